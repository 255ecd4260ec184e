#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medboot/dataset.hpp"
#include "medboot/regression.hpp"
#include "medboot/resampling.hpp"

// Mediation-effect tests for the linear structural equation model.
//
// The null "no mediation through M" is composite: the product of the
// exposure->mediator coefficient alpha and the mediator->outcome coefficient
// beta vanishes when either factor is zero or both are. Classical bootstrap,
// Sobel, and MaxP tests are conservative when both are zero; the adaptive
// bootstrap statistics implemented here switch to a local expansion on
// replicates where both t statistics fall below a threshold
// lambda_n = lambda * sqrt(n) / log(n), restoring uniform p-values across
// the whole null.
//
// Method families:
//   poc   product of coefficients, single mediator ("poc-ab", "poc-b",
//         "poc-sobel")
//   js    joint significance / min-|t| statistic, single mediator ("js-ab",
//         "js-b", "js-maxp")
//   joint inner product alpha^T beta across J mediators ("joint-ab",
//         "joint-b"), plus per-mediator tests that adjust for the others
//
// Every bootstrap method draws replicate r from the same substream
// derive(seed, r) and consumes only the resampled row indices from it, so
// methods with equal (seed, B, n) share index streams and results are
// bit-identical across worker counts.

namespace medboot {

// Threshold lambda * sqrt(n) / log(n) (natural log).
double threshold_lambda_n(double lambda, std::int64_t n);

struct AbConfig {
  double lambda = 2.0;          // threshold scale; 0 disables the local branch
  std::vector<double> b_alpha;  // local-alternative offsets; empty = zeros
  std::vector<double> b_beta;
  BootstrapConfig bootstrap;
  std::vector<double> omega_grid{0.05};  // decision significance levels
};

struct Decision {
  double omega = 0.0;
  bool reject = false;
};

struct TestResult {
  std::string method;
  double estimate = 0.0;        // effect-scale point estimate
  double p_value = 1.0;
  double indicator_rate = 0.0;  // fraction of replicates on the local branch
  std::vector<Decision> decisions;
  BootstrapDistribution distribution;  // sorted draws; empty for plug-in tests
  int target = -1;  // mediator index for per-mediator tests, else -1
};

// Throws InputError unless every level lies strictly inside (0,1).
void validate_omegas(const std::vector<double>& omegas);

// One reject/accept verdict per level: reject iff p <= omega.
std::vector<Decision> make_decisions(const std::vector<double>& omegas,
                                     double p);

// ---------------------------------------------------------------------------
// Product-of-coefficients family (single mediator)

struct PocComponents {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double sigma_alpha = 0.0;  // sqrt(mean(eps_M^2) / mean(S_perp^2))
  double sigma_beta = 0.0;
  double t_alpha = 0.0;      // sqrt(n) * alpha_hat / sigma_alpha
  double t_beta = 0.0;
  ProjectionSet projections;
  std::vector<double> eps_m;  // mediator-model residuals
  std::vector<double> eps_y;  // outcome-model residuals
};

// Fits M ~ X + S and Y ~ M + X + S and assembles the standardized
// statistics. Throws DegenerateResponse when either scale is zero (the t
// statistics would be undefined).
PocComponents poc_components(const Dataset& data);

// First-order delta-method test of alpha*beta. z is defined as 0 when both
// coefficients are zero. Method tag "poc-sobel".
TestResult sobel_test(const PocComponents& components,
                      const std::vector<double>& omega_grid = {0.05});

// Adaptive bootstrap test of alpha*beta ("poc-ab"). With lambda = 0 every
// replicate takes the classical branch and the result matches
// classical_poc_test bit for bit under the same seed.
TestResult adaptive_poc_test(const Dataset& data, const AbConfig& config);

// Classical nonparametric bootstrap of alpha*beta ("poc-b"); the threshold
// never engages. Replicate acceptance rules match the adaptive test so the
// two stay on identical index streams.
TestResult classical_poc_test(const Dataset& data, const AbConfig& config);

// ---------------------------------------------------------------------------
// Joint-significance family (single mediator)

struct JsComponents {
  double t_alpha = 0.0;
  double t_beta = 0.0;
  double theta_scaled = 0.0;  // H(t_alpha, t_beta) = sqrt(n) * theta_hat
  int sel_alpha = 0;          // h selector: exactly one of the pair is 1
  int sel_beta = 0;
};

// The min-absolute-value selector H and its indicator pair h. Ties resolve
// to the first argument.
double h_statistic(double t1, double t2);
std::pair<int, int> h_select(double t1, double t2);

JsComponents js_components(const PocComponents& components);

// MaxP test: p = max of the two two-sided normal p-values ("js-maxp").
TestResult maxp_test(const PocComponents& components,
                     const std::vector<double>& omega_grid = {0.05});

// Adaptive bootstrap of the min-|t| statistic ("js-ab"). Draws and the
// observed statistic both carry the sqrt(n) scale; no 1/n factor on the
// local branch.
TestResult adaptive_js_test(const Dataset& data, const AbConfig& config);

// Classical bootstrap of the min-|t| statistic ("js-b").
TestResult classical_js_test(const Dataset& data, const AbConfig& config);

// ---------------------------------------------------------------------------
// Multivariate joint family

struct JointComponents {
  std::vector<double> alpha_vec;  // per-mediator exposure coefficients
  std::vector<double> beta_vec;   // joint outcome-model coefficients
  std::vector<double> sigma_alpha_vec;
  std::vector<double> sigma_beta_vec;
  std::vector<double> t_alpha_vec;
  std::vector<double> t_beta_vec;
  double product = 0.0;  // alpha^T beta
};

// J separate mediator regressions plus one joint outcome regression, in the
// dataset's mediator order. Throws DegenerateResponse if any coordinate's
// scale is zero.
JointComponents joint_components(const Dataset& data);

// Adaptive bootstrap test of alpha^T beta ("joint-ab"). The local branch
// engages only when all 4J observed and resampled t statistics are below
// lambda_n. Internally mediators are processed in a canonical column order,
// so permuting the input mediators leaves the p-value bit-identical.
TestResult adaptive_joint_test(const Dataset& data, const AbConfig& config);

// Classical bootstrap of alpha^T beta ("joint-b").
TestResult classical_joint_test(const Dataset& data, const AbConfig& config);

// Tests mediator `target` while treating the remaining mediators as
// outcome-model covariates: they are appended to X (in their original
// order) and the single-mediator adaptive test runs on the derived dataset.
TestResult individual_within_multi_test(const Dataset& data,
                                        std::size_t target,
                                        const AbConfig& config);

// ---------------------------------------------------------------------------
// Diagnostics

namespace detail {

// One replicate of the linear kernel, exposed for validation: the score
// terms z_s and z_m must equal sqrt(n) * (coefficient change under the
// resample) up to floating-point error, for both resampling schemes.
struct ReplicateProbe {
  std::vector<double> alpha_star;
  std::vector<double> beta_star;
  std::vector<double> z_s;
  std::vector<double> z_m;
  bool local_branch = false;
  double value = 0.0;
};

std::optional<ReplicateProbe> probe_linear_replicate(const Dataset& data,
                                                     const AbConfig& config,
                                                     int replicate_index);

}  // namespace detail

}  // namespace medboot
