#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medboot/dataset.hpp"
#include "medboot/glm_ab.hpp"
#include "medboot/linear_ab.hpp"
#include "medboot/report.hpp"

// Analysis orchestration shared by the command-line tool and tests: method
// dispatch by tag over an assembled dataset, and the two-step
// screen-then-confirm pipeline for many-mediator studies.

namespace medboot {

// Method tags runnable on a dataset. Single-mediator families (poc-*, js-*,
// glm*-*) require exactly one declared mediator; joint-* accept any count.
// Unknown tags throw InputError.
//
//   poc-ab poc-b poc-sobel   product of coefficients
//   js-ab js-b js-maxp       joint significance (min |t|)
//   joint-ab joint-b         inner product across mediators
//   glm1-ab glm1-b           binary mediator + binary outcome (log-OR NIE)
//   glm2-ab glm2-b           binary mediator + linear outcome (mean diff)
std::vector<std::string> known_method_tags();

struct RunOptions {
  std::string method = "poc-ab";
  AbConfig ab;
  // GLM scenarios only: evaluation point of the conditional NIE and the
  // optional per-coefficient threshold scales.
  NieQuery query;
  std::optional<double> lambda_alpha;
  std::optional<double> lambda_beta;
};

TestResult run_single_test(const Dataset& data, const RunOptions& options);

// Two-step pipeline for J mediators: Step 1 tests every mediator marginally
// (single-mediator model, the others ignored) and retains the
// screen_fraction with the smallest p-values — ties at the cutoff are all
// retained, so the realized count may exceed ceil(screen_fraction * J) and
// is reported. Step 2 reruns each retained mediator with the OTHER RETAINED
// mediators as outcome-model covariates and BH-adjusts those p-values at
// fdr_q. A lone survivor has no co-mediators to adjust for, so its
// confirmation is the plain single-mediator test.
//
// With split_fraction < 1 the rows are first partitioned by a seeded
// shuffle: Step 1 sees a split_fraction share, Step 2 the rest, and the
// realized partition is emitted in the report. split_fraction = 1 runs both
// steps on all rows.
//
// Determinism: with master seed s = ab.bootstrap.seed, the shuffle draws
// from substream derive(s, 0), the Step-1 test of mediator j from
// derive(derive(s, 1), j), and the Step-2 test from derive(derive(s, 2), j),
// j being the original mediator index — so results do not depend on worker
// count or on which other mediators survive screening.
struct ScreenOptions {
  std::string method = "poc-ab";  // "poc-ab" or "poc-b" (classical variant)
  double screen_fraction = 0.1;   // (0, 1]
  double fdr_q = 0.1;             // [0, 1); 0 rejects nothing
  double split_fraction = 1.0;    // (0, 1]
  AbConfig ab;
};

AnalysisReport screen_then_joint(const Dataset& data,
                                 const ScreenOptions& options);

// Rows of `data` at `rows` (ascending duplicates allowed), roles preserved.
Dataset subset_rows(const Dataset& data, const std::vector<std::int64_t>& rows);

}  // namespace medboot
