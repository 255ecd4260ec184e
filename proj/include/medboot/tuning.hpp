#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medboot/dataset.hpp"
#include "medboot/resampling.hpp"

// Double-bootstrap tooling for choosing the adaptive threshold scale and for
// confirmatory pattern diagnostics, for the single-mediator product test.
//
// The idea: process the observed data so the null holds by construction,
// then watch how the test's p-values distribute over resamples of the
// processed data. The projector P_S(C) = C - S (S'S)^-1 S'C maps a column C
// onto the space orthogonal to the exposure observations (no intercept is
// involved; the dataset's intercept column is projected like any other).
//
//   mode alpha  replace (M, X) by their projections orthogonal to S; the
//               refitted exposure coefficient of the mediator model is then
//               exactly zero, and the outcome model's mediator coefficient
//               is untouched.
//   mode beta   replace (Y, S, X) by their projections orthogonal to the
//               mediator's residual on (X, S) — the outcome model's
//               effective mediator regressor. The refitted mediator
//               coefficient of the outcome model is zero, and because that
//               residual is already orthogonal to S and X, the mediator
//               model keeps its fit. (Projecting off the raw mediator
//               column instead would zero the mediator-model exposure
//               coefficient too, making every beta-processed dataset mimic
//               the doubly-degenerate case.)
//   mode both   alpha first, then beta on the alpha-processed columns;
//               both refitted coefficients are zero.
//
// The double bootstrap draws pairs resamples of the processed data (outer
// layer) and runs the adaptive product test on each resample (inner layer),
// yielding a sample of p-values. If the threshold scale calibrates the test
// on data whose null holds by construction, that sample looks uniform.

namespace medboot {

enum class ProcessingMode { alpha, beta, both };

const char* processing_mode_name(ProcessingMode mode);  // "alpha"/"beta"/"both"

struct ProcessedDataset {
  ProcessingMode mode = ProcessingMode::alpha;
  Dataset data;
};

// Projects the affected columns as described above. One mediator only.
ProcessedDataset residual_project(const Dataset& data, ProcessingMode mode);

struct DoubleBootstrapConfig {
  int b_outer = 500;       // outer pairs resamples
  int b_inner = 500;       // replicates inside each inner adaptive test
  double lambda = 0.0;     // threshold scale handed to the inner tests
  std::uint64_t seed = 0;  // master seed; outer replicate r derives from it
  int workers = 0;         // outer-layer parallelism; inner tests run serial
};

struct DoubleBootstrapResult {
  std::vector<double> p_values;  // sorted ascending, b_outer minus missing
  int missing = 0;  // outer replicates dropped after one failed retry
  double lambda = 0.0;
};

// Outer replicate r resamples rows with indices drawn from
// Engine(derive_seed(derive_seed(seed, r), 0)) and runs the adaptive product
// test with bootstrap seed derive_seed(derive_seed(seed, r), 1). A replicate
// that fails with a resample-specific numerical error is retried once on the
// substreams derived with 2 and 3 in place of 0 and 1, then recorded as
// missing. Configuration errors propagate. Deterministic for any worker
// count.
DoubleBootstrapResult double_bootstrap(const Dataset& data,
                                       const DoubleBootstrapConfig& config);

// One-sample Kolmogorov-Smirnov distance between the sample and U(0,1).
double ks_uniform_distance(const std::vector<double>& sample);

// First-term inversion of the asymptotic Kolmogorov tail: uniformity is
// rejected at `level` when sqrt(N) * distance exceeds this value.
double ks_critical_value(double level);

// True when the sample is consistent with U(0,1) at the given level.
bool ks_uniform_pass(const std::vector<double>& sample, double level);

// Numeric reading of a p-value sample's QQ shape. "Conservative" means the
// fraction of p-values below 0.05 is under half the nominal 0.05;
// "bent upward" means it exceeds double the nominal; "uniform" is the KS
// test at level 0.01. The cutoffs are declared conventions: the reference
// analyses judged the same shapes from QQ plots by eye.
struct PvalueShape {
  double fraction_below_005 = 0.0;
  bool conservative = false;
  bool bent_up = false;
  bool uniform = false;
};

PvalueShape classify_pvalues(const std::vector<double>& sample);

struct LambdaDiagnostic {
  double lambda = 0.0;
  double ks_distance = 0.0;
  bool passed = false;  // KS at 0.01
};

struct SelectLambdaConfig {
  std::vector<double> grid{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};  // ascending
  int b_outer = 500;
  int b_inner = 500;
  std::uint64_t seed = 0;
  int workers = 0;
};

struct LambdaSelection {
  double lambda = 2.0;
  // True when the screening stage saw both processed arms conservative
  // (both coefficients plausibly zero) and the grid search ran.
  bool degenerate_case = false;
  std::string note;  // "degenerate case" / "non-degenerate case"
  PvalueShape alpha_shape;  // screening diagnostics at lambda = 0
  PvalueShape beta_shape;
  std::vector<LambdaDiagnostic> grid;  // evaluated grid entries, in order
};

// Threshold-scale selection. Stage one runs the double bootstrap at
// lambda = 0 on the alpha- and beta-processed data (sub-seeds
// derive_seed(seed, 1) and derive_seed(seed, 2)). If both p-value samples
// are conservative, both coefficients are plausibly zero and the classical
// statistic is miscalibrated: stage two walks the grid on the both-processed
// data (sub-seed derive_seed(derive_seed(seed, 3), i) for grid index i) and
// returns the smallest lambda whose p-values pass the KS test at 0.01,
// throwing GridExhausted when none does. Otherwise the composite null is not
// in its degenerate corner, any threshold preserves the stage-one shapes,
// and the default lambda = 2 is returned with a "non-degenerate case" note.
LambdaSelection select_lambda(const Dataset& data,
                              const SelectLambdaConfig& config);

enum class ConfirmatoryPattern {
  both_zero,    // all three samples conservative
  alpha_zero,   // observed + alpha-processed uniform, beta-processed conservative
  beta_zero,    // observed + beta-processed uniform, alpha-processed conservative
  alternative,  // observed bent upward, both processed samples uniform
  inconclusive
};

// "both-zero evidence", "alpha-zero evidence", "beta-zero evidence",
// "alternative evidence", "inconclusive".
const char* confirmatory_pattern_name(ConfirmatoryPattern pattern);

struct ConfirmatoryConfig {
  // Threshold scale for the inner tests. The published procedure fixes 0,
  // making the inner test the classical bootstrap; the pattern table below
  // is calibrated for that choice.
  double lambda = 0.0;
  int b_outer = 500;
  int b_inner = 500;
  std::uint64_t seed = 0;
  int workers = 0;
};

struct ConfirmatoryResult {
  ConfirmatoryPattern pattern = ConfirmatoryPattern::inconclusive;
  DoubleBootstrapResult observed;         // sub-seed derive_seed(seed, 1)
  DoubleBootstrapResult alpha_processed;  // sub-seed derive_seed(seed, 2)
  DoubleBootstrapResult beta_processed;   // sub-seed derive_seed(seed, 3)
  PvalueShape observed_shape;
  PvalueShape alpha_shape;
  PvalueShape beta_shape;
};

// Runs the double bootstrap on the observed data and on both processed
// variants, then reads the three shapes jointly. A conservative shape
// appears exactly when the processing (or the data itself) leaves both
// coefficients at zero, so the arm that turns conservative identifies which
// single coefficient was already zero. Labels are evidence statements, not
// ground truth.
ConfirmatoryResult confirmatory_analysis(const Dataset& data,
                                         const ConfirmatoryConfig& config);

}  // namespace medboot
