#include "medboot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "medboot/errors.hpp"
#include "medboot/rng.hpp"
#include "medboot/simstudy.hpp"  // format_double

namespace medboot {

namespace {

GlmConfig glm_config(const RunOptions& options) {
  GlmConfig cfg;
  cfg.ab = options.ab;
  cfg.lambda_alpha = options.lambda_alpha;
  cfg.lambda_beta = options.lambda_beta;
  return cfg;
}

void require_single_mediator(const Dataset& data, const std::string& tag) {
  if (data.j() != 1) {
    throw_error(ErrorKind::input_error,
                "method '" + tag + "' needs exactly one mediator, got " +
                    std::to_string(data.j()));
  }
}

}  // namespace

std::vector<std::string> known_method_tags() {
  return {"poc-ab", "poc-b", "poc-sobel", "js-ab",   "js-b",   "js-maxp",
          "joint-ab", "joint-b", "glm1-ab", "glm1-b", "glm2-ab", "glm2-b"};
}

TestResult run_single_test(const Dataset& data, const RunOptions& options) {
  const std::string& tag = options.method;
  if (tag == "joint-ab") return adaptive_joint_test(data, options.ab);
  if (tag == "joint-b") return classical_joint_test(data, options.ab);

  if (tag == "glm1-ab" || tag == "glm1-b" || tag == "glm2-ab" ||
      tag == "glm2-b") {
    require_single_mediator(data, tag);
    const GlmScenario scenario = (tag[3] == '1') ? GlmScenario::logistic_outcome
                                                 : GlmScenario::linear_outcome;
    const GlmConfig cfg = glm_config(options);
    return tag.ends_with("-ab")
               ? adaptive_glm_test(data, scenario, options.query, cfg)
               : classical_glm_test(data, scenario, options.query, cfg);
  }

  require_single_mediator(data, tag);
  if (tag == "poc-ab") return adaptive_poc_test(data, options.ab);
  if (tag == "poc-b") return classical_poc_test(data, options.ab);
  if (tag == "poc-sobel") {
    return sobel_test(poc_components(data), options.ab.omega_grid);
  }
  if (tag == "js-ab") return adaptive_js_test(data, options.ab);
  if (tag == "js-b") return classical_js_test(data, options.ab);
  if (tag == "js-maxp") {
    return maxp_test(poc_components(data), options.ab.omega_grid);
  }
  throw_error(ErrorKind::input_error, "unknown method tag '" + tag + "'");
}

Dataset subset_rows(const Dataset& data,
                    const std::vector<std::int64_t>& rows) {
  auto take = [&](const std::vector<double>& column) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::int64_t r : rows) out.push_back(column[static_cast<std::size_t>(r)]);
    return out;
  };
  std::vector<std::vector<double>> mediators, extra;
  for (const auto& m : data.mediators) mediators.push_back(take(m));
  for (std::size_t k = 1; k < data.covariates.size(); ++k) {
    extra.push_back(take(data.covariates[k]));
  }
  std::vector<std::string> extra_names(data.covariate_names.begin() + 1,
                                       data.covariate_names.end());
  Dataset out = make_dataset(take(data.exposure), std::move(mediators),
                             take(data.outcome), std::move(extra),
                             data.mediator_names, extra_names);
  out.exposure_name = data.exposure_name;
  out.outcome_name = data.outcome_name;
  return out;
}

namespace {

Dataset select_mediators(const Dataset& data,
                         const std::vector<std::size_t>& which) {
  std::vector<std::vector<double>> mediators;
  std::vector<std::string> names;
  for (std::size_t j : which) {
    mediators.push_back(data.mediators[j]);
    names.push_back(data.mediator_names[j]);
  }
  std::vector<std::vector<double>> extra(data.covariates.begin() + 1,
                                         data.covariates.end());
  std::vector<std::string> extra_names(data.covariate_names.begin() + 1,
                                       data.covariate_names.end());
  Dataset out = make_dataset(data.exposure, std::move(mediators), data.outcome,
                             std::move(extra), std::move(names), extra_names);
  out.exposure_name = data.exposure_name;
  out.outcome_name = data.outcome_name;
  return out;
}

}  // namespace

AnalysisReport screen_then_joint(const Dataset& data,
                                 const ScreenOptions& options) {
  if (options.method != "poc-ab" && options.method != "poc-b") {
    throw_error(ErrorKind::input_error,
                "screening supports methods 'poc-ab' and 'poc-b', got '" +
                    options.method + "'");
  }
  if (!std::isfinite(options.screen_fraction) ||
      options.screen_fraction <= 0.0 || options.screen_fraction > 1.0) {
    throw_error(ErrorKind::input_error,
                "screen fraction must lie in (0, 1], got " +
                    format_double(options.screen_fraction));
  }
  if (!std::isfinite(options.split_fraction) ||
      options.split_fraction <= 0.0 || options.split_fraction > 1.0) {
    throw_error(ErrorKind::input_error,
                "split fraction must lie in (0, 1], got " +
                    format_double(options.split_fraction));
  }
  const bool classical = options.method == "poc-b";
  const std::size_t j_count = data.j();
  const std::uint64_t seed = options.ab.bootstrap.seed;

  // Row partition. The shuffle has its own substream so changing B or the
  // method leaves the split alone; indices are re-sorted because only
  // membership is random, not order.
  std::vector<std::int64_t> rows_a(static_cast<std::size_t>(data.n));
  std::iota(rows_a.begin(), rows_a.end(), 0);
  std::vector<std::int64_t> rows_b;
  bool split = options.split_fraction < 1.0;
  if (split) {
    rng::Engine shuffle(rng::derive_seed(seed, 0));
    for (std::size_t i = rows_a.size(); i-- > 1;) {
      const auto k = static_cast<std::size_t>(
          shuffle.next_index(static_cast<std::int32_t>(i + 1)));
      std::swap(rows_a[i], rows_a[k]);
    }
    auto n_a = static_cast<std::int64_t>(
        std::llround(options.split_fraction * static_cast<double>(data.n)));
    n_a = std::clamp<std::int64_t>(n_a, 1, data.n - 1);
    rows_b.assign(rows_a.begin() + n_a, rows_a.end());
    rows_a.resize(static_cast<std::size_t>(n_a));
    std::sort(rows_a.begin(), rows_a.end());
    std::sort(rows_b.begin(), rows_b.end());
  }
  const Dataset data_a = split ? subset_rows(data, rows_a) : data;
  const Dataset data_b = split ? subset_rows(data, rows_b) : data;

  AnalysisReport report;
  report.command = "screen";

  // Step 1: marginal single-mediator tests.
  const std::uint64_t step1_root = rng::derive_seed(seed, 1);
  std::vector<double> step1_p(j_count);
  for (std::size_t j = 0; j < j_count; ++j) {
    Dataset marginal = select_mediators(data_a, {j});
    AbConfig cfg = options.ab;
    cfg.bootstrap.seed = rng::derive_seed(step1_root, j);
    TestResult result = classical ? classical_poc_test(marginal, cfg)
                                  : adaptive_poc_test(marginal, cfg);
    result.target = static_cast<int>(j);
    step1_p[j] = result.p_value;
    report.records.push_back(
        TestRecord{data.mediator_names[j], 1, std::move(result)});
  }

  // Retention: the ceil(f * J) smallest p-values, plus everything tied with
  // the cutoff value.
  const auto target = static_cast<std::size_t>(std::ceil(
      options.screen_fraction * static_cast<double>(j_count)));
  std::vector<std::size_t> order(j_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (step1_p[a] != step1_p[b]) return step1_p[a] < step1_p[b];
    return a < b;
  });
  const double cutoff = step1_p[order[std::min(target, j_count) - 1]];
  std::vector<std::size_t> retained;
  for (std::size_t j = 0; j < j_count; ++j) {
    if (step1_p[j] <= cutoff) retained.push_back(j);
  }
  if (retained.empty()) {
    throw_error(ErrorKind::input_error, "screening retained no mediators");
  }

  // Step 2: each retained mediator against the outcome, adjusting for the
  // other retained mediators. A lone survivor has nothing to adjust for and
  // gets the plain single-mediator test.
  const Dataset joint = select_mediators(data_b, retained);
  const std::uint64_t step2_root = rng::derive_seed(seed, 2);
  std::vector<double> step2_p;
  for (std::size_t t = 0; t < retained.size(); ++t) {
    const std::size_t j = retained[t];
    AbConfig cfg = options.ab;
    cfg.bootstrap.seed = rng::derive_seed(step2_root, j);
    if (classical) cfg.lambda = 0.0;
    TestResult result = retained.size() == 1
                            ? adaptive_poc_test(joint, cfg)
                            : individual_within_multi_test(joint, t, cfg);
    result.target = static_cast<int>(j);
    step2_p.push_back(result.p_value);
    report.records.push_back(
        TestRecord{data.mediator_names[j], 2, std::move(result)});
  }

  const BhResult bh = bh_adjust(step2_p, options.fdr_q);

  ScreenSummary summary;
  summary.retain_target = static_cast<int>(std::min(target, j_count));
  for (std::size_t j : retained) summary.retained.push_back(data.mediator_names[j]);
  if (split) {
    summary.split_a = rows_a;
    summary.split_b = rows_b;
  }
  summary.step2_p = step2_p;
  summary.q_values = bh.adjusted;
  summary.rejected = bh.reject;
  summary.fdr_q = options.fdr_q;
  report.screen = std::move(summary);

  nlohmann::ordered_json config;
  config["method"] = options.method;
  config["screen_fraction"] = options.screen_fraction;
  config["fdr_q"] = options.fdr_q;
  config["split_fraction"] = options.split_fraction;
  config["lambda"] = options.ab.lambda;
  config["b"] = options.ab.bootstrap.b;
  config["seed"] = options.ab.bootstrap.seed;
  config["scheme"] = scheme_name(options.ab.bootstrap.scheme);
  config["omega_grid"] = options.ab.omega_grid;
  report.config = std::move(config);
  return report;
}

}  // namespace medboot
