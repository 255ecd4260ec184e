#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medboot/linear_ab.hpp"

// Multiple-testing correction and the versioned JSON analysis report the
// command-line tool emits. Reports are deterministic: two runs with equal
// seeds serialize to equal bytes regardless of worker count, because the
// worker setting is never written (it is advisory, not part of the result).

namespace medboot {

inline constexpr const char* kToolName = "medboot";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "medboot/1";

// Benjamini-Hochberg step-up correction at target false-discovery rate q.
// With p(1) <= ... <= p(m) the rejected set is every p <= p(k) where
// k = max{i : p(i) <= i q / m}; the adjusted value of rank i is
// min over j >= i of m p(j) / j, capped at 1, so `reject[i]` is equivalent
// to `adjusted[i] <= q`. q = 0 is accepted and rejects nothing (bootstrap
// p-values are bounded away from zero by the add-one smoothing).
struct BhResult {
  std::vector<bool> reject;      // parallel to the input
  std::vector<double> adjusted;  // parallel to the input, nondecreasing in p
};

// Requires every p in (0, 1] and q in [0, 1). Empty input gives empty output.
BhResult bh_adjust(const std::vector<double>& pvalues, double q);

// One test inside a report. `step` tags the screening pipeline stage
// (1 = marginal screen, 2 = joint confirmation); single-test reports use 0.
struct TestRecord {
  std::string label;  // mediator name, or the method tag for single tests
  int step = 0;
  TestResult result;
};

// Screening-specific block: the realized mediator retention and the
// BH correction of the confirmation p-values.
struct ScreenSummary {
  int retain_target = 0;               // ceil(screen_fraction * J)
  std::vector<std::string> retained;   // names, original mediator order
  std::vector<std::int64_t> split_a;   // screening rows (empty = no split)
  std::vector<std::int64_t> split_b;   // confirmation rows (empty = no split)
  std::vector<double> step2_p;         // parallel to `retained`
  std::vector<double> q_values;        // BH-adjusted, parallel to `retained`
  std::vector<bool> rejected;          // parallel to `retained`
  double fdr_q = 0.0;
};

struct AnalysisReport {
  std::string schema = kReportSchema;
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string command;  // producing subcommand: "run" or "screen"
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<TestRecord> records;
  std::optional<ScreenSummary> screen;
};

// Lossless serialization: report_from_json(report_json(r)) == r. Every
// number is printed in shortest round-trip form, so equal reports give
// equal bytes and equal bytes give equal reports. Timing never appears;
// callers wanting a wall-time field on stdout add it to the emitted JSON
// themselves (files stay timing-free so reruns are byte-comparable).
nlohmann::ordered_json report_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::ordered_json& j);

bool operator==(const AnalysisReport& a, const AnalysisReport& b);
inline bool operator!=(const AnalysisReport& a, const AnalysisReport& b) {
  return !(a == b);
}

// Long-format table of the report's decisions, one row per (record, omega):
// label,step,method,omega,estimate,p_value,indicator_rate,reject,q_value,
// fdr_reject — the last two blank except on screening confirmation rows.
std::string report_csv(const AnalysisReport& report);

}  // namespace medboot
