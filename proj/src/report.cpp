#include "medboot/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>

#include "medboot/errors.hpp"
#include "medboot/simstudy.hpp"  // format_double

namespace medboot {

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

BhResult bh_adjust(const std::vector<double>& pvalues, double q) {
  if (!std::isfinite(q) || q < 0.0 || q >= 1.0) {
    throw_error(ErrorKind::input_error,
                "FDR target must lie in [0, 1), got " + format_double(q));
  }
  for (double p : pvalues) {
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
      throw_error(ErrorKind::input_error,
                  "p-values must lie in (0, 1], got " + format_double(p));
    }
  }

  const std::size_t m = pvalues.size();
  BhResult out;
  out.reject.assign(m, false);
  out.adjusted.assign(m, 1.0);
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pvalues[a] != pvalues[b]) return pvalues[a] < pvalues[b];
    return a < b;
  });

  // Adjusted value of rank i: min over j >= i of m p(j) / j, capped at 1.
  // The last rank's factor m/m is applied exactly so adjusted >= p holds as
  // an identity, not just up to rounding.
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double p = pvalues[order[r]];
    const double scaled =
        r + 1 == m ? p
                   : p * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, scaled);
    out.adjusted[order[r]] = std::min(1.0, running);
  }

  // Step-up cutoff: the largest rank whose p sits under its own threshold.
  std::size_t k = 0;
  bool any = false;
  for (std::size_t r = 0; r < m; ++r) {
    if (pvalues[order[r]] <= static_cast<double>(r + 1) * q /
                                 static_cast<double>(m)) {
      k = r;
      any = true;
    }
  }
  if (any) {
    for (std::size_t r = 0; r <= k; ++r) out.reject[order[r]] = true;
  }
  return out;
}

namespace {

ordered_json decisions_json(const std::vector<Decision>& decisions) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : decisions) {
    arr.push_back(ordered_json{{"omega", d.omega}, {"reject", d.reject}});
  }
  return arr;
}

ordered_json result_json(const TestResult& r) {
  ordered_json j;
  j["method"] = r.method;
  j["estimate"] = r.estimate;
  j["p_value"] = r.p_value;
  j["indicator_rate"] = r.indicator_rate;
  j["target"] = r.target;
  j["decisions"] = decisions_json(r.decisions);
  // Provenance of the bootstrap draws. The worker count is deliberately
  // absent: it never changes the draws, and writing it would make otherwise
  // identical runs compare unequal.
  j["scheme"] = scheme_name(r.distribution.config.scheme);
  j["b"] = r.distribution.config.b;
  j["seed"] = r.distribution.config.seed;
  j["draws"] = r.distribution.samples;
  return j;
}

const ordered_json& need(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw_error(ErrorKind::input_error,
                std::string("report JSON is missing key '") + key + "'");
  }
  return *it;
}

TestResult result_from_json(const ordered_json& j) {
  TestResult r;
  r.method = need(j, "method").get<std::string>();
  r.estimate = need(j, "estimate").get<double>();
  r.p_value = need(j, "p_value").get<double>();
  r.indicator_rate = need(j, "indicator_rate").get<double>();
  r.target = need(j, "target").get<int>();
  for (const auto& d : need(j, "decisions")) {
    r.decisions.push_back(
        Decision{need(d, "omega").get<double>(), need(d, "reject").get<bool>()});
  }
  const std::string scheme = need(j, "scheme").get<std::string>();
  if (scheme == scheme_name(BootstrapScheme::pairs)) {
    r.distribution.config.scheme = BootstrapScheme::pairs;
  } else if (scheme == scheme_name(BootstrapScheme::projected)) {
    r.distribution.config.scheme = BootstrapScheme::projected;
  } else {
    throw_error(ErrorKind::input_error,
                "unknown resampling scheme '" + scheme + "' in report JSON");
  }
  r.distribution.config.b = need(j, "b").get<int>();
  r.distribution.config.seed = need(j, "seed").get<std::uint64_t>();
  r.distribution.samples = need(j, "draws").get<std::vector<double>>();
  r.distribution.method = r.method;
  return r;
}

}  // namespace

ordered_json report_json(const AnalysisReport& report) {
  ordered_json j;
  j["schema"] = report.schema;
  j["tool"] = report.tool;
  j["version"] = report.version;
  j["command"] = report.command;
  j["config"] = report.config;
  ordered_json records = ordered_json::array();
  for (const auto& rec : report.records) {
    ordered_json rj;
    rj["label"] = rec.label;
    rj["step"] = rec.step;
    rj["result"] = result_json(rec.result);
    records.push_back(std::move(rj));
  }
  j["records"] = std::move(records);
  if (report.screen) {
    const ScreenSummary& s = *report.screen;
    ordered_json sj;
    sj["retain_target"] = s.retain_target;
    sj["retained"] = s.retained;
    sj["split_a"] = s.split_a;
    sj["split_b"] = s.split_b;
    sj["step2_p"] = s.step2_p;
    sj["q_values"] = s.q_values;
    sj["rejected"] = s.rejected;
    sj["fdr_q"] = s.fdr_q;
    j["screen"] = std::move(sj);
  }
  return j;
}

AnalysisReport report_from_json(const ordered_json& j) {
  AnalysisReport report;
  report.schema = need(j, "schema").get<std::string>();
  if (report.schema != kReportSchema) {
    throw_error(ErrorKind::input_error,
                "unsupported report schema '" + report.schema + "' (expected '" +
                    kReportSchema + "')");
  }
  report.tool = need(j, "tool").get<std::string>();
  report.version = need(j, "version").get<std::string>();
  report.command = need(j, "command").get<std::string>();
  report.config = need(j, "config");
  for (const auto& rj : need(j, "records")) {
    TestRecord rec;
    rec.label = need(rj, "label").get<std::string>();
    rec.step = need(rj, "step").get<int>();
    rec.result = result_from_json(need(rj, "result"));
    report.records.push_back(std::move(rec));
  }
  if (j.contains("screen")) {
    const ordered_json& sj = j["screen"];
    ScreenSummary s;
    s.retain_target = need(sj, "retain_target").get<int>();
    s.retained = need(sj, "retained").get<std::vector<std::string>>();
    s.split_a = need(sj, "split_a").get<std::vector<std::int64_t>>();
    s.split_b = need(sj, "split_b").get<std::vector<std::int64_t>>();
    s.step2_p = need(sj, "step2_p").get<std::vector<double>>();
    s.q_values = need(sj, "q_values").get<std::vector<double>>();
    s.rejected = need(sj, "rejected").get<std::vector<bool>>();
    s.fdr_q = need(sj, "fdr_q").get<double>();
    report.screen = std::move(s);
  }
  return report;
}

bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
  // Canonical form decides equality; fields the serialization deliberately
  // drops (worker counts, duplicated method tags) never make two logically
  // identical reports compare unequal.
  return report_json(a) == report_json(b);
}

std::string report_csv(const AnalysisReport& report) {
  std::string out =
      "label,step,method,omega,estimate,p_value,indicator_rate,reject,"
      "q_value,fdr_reject\n";
  for (const auto& rec : report.records) {
    std::string q_value, fdr_reject;
    if (rec.step == 2 && report.screen) {
      const auto& s = *report.screen;
      const auto it =
          std::find(s.retained.begin(), s.retained.end(), rec.label);
      if (it != s.retained.end()) {
        const std::size_t pos =
            static_cast<std::size_t>(it - s.retained.begin());
        q_value = format_double(s.q_values[pos]);
        fdr_reject = s.rejected[pos] ? "1" : "0";
      }
    }
    for (const auto& d : rec.result.decisions) {
      out += rec.label;
      out += ',';
      out += std::to_string(rec.step);
      out += ',';
      out += rec.result.method;
      out += ',';
      out += format_double(d.omega);
      out += ',';
      out += format_double(rec.result.estimate);
      out += ',';
      out += format_double(rec.result.p_value);
      out += ',';
      out += format_double(rec.result.indicator_rate);
      out += ',';
      out += d.reject ? "1" : "0";
      out += ',';
      out += q_value;
      out += ',';
      out += fdr_reject;
      out += '\n';
    }
  }
  return out;
}

}  // namespace medboot
