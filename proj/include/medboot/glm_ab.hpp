#pragma once

#include <optional>
#include <vector>

#include "medboot/dataset.hpp"
#include "medboot/linear_ab.hpp"
#include "medboot/regression.hpp"

// Adaptive bootstrap tests of the natural indirect effect (NIE) when the
// mediator is binary (logistic mediator model). Two outcome scenarios are
// supported:
//
//   logistic_outcome  binary Y; the NIE is a conditional log odds ratio
//                     l(P_s) - l(P_{s*}) with l the logit, evaluated at a
//                     user-supplied covariate row x and exposure contrast
//                     (s, s*). Method tags "glm1-ab" / "glm1-b".
//   linear_outcome    continuous Y; the NIE is the mean difference
//                     beta_M * {g(alpha_S s + x'alpha_X)
//                               - g(alpha_S s* + x'alpha_X)}.
//                     Method tags "glm2-ab" / "glm2-b".
//
// As in the linear kernels, the composite null alpha_S * beta_M = 0 makes
// the classical bootstrap conservative when both coefficients vanish; the
// adaptive statistic switches to a local expansion built from logistic score
// increments on replicates where all four t statistics (observed and
// resampled, alpha and beta) fall below their thresholds. Replicates are
// pairs resamples only: the projected scheme is a linear-model shortcut and
// is rejected here.

namespace medboot {

enum class GlmScenario { logistic_outcome, linear_outcome };

const char* glm_scenario_name(GlmScenario scenario);  // "glm1" / "glm2"

// Where the conditional NIE is evaluated: exposure contrast s vs s_star at
// covariate row x (including the intercept slot). An empty x means the
// intercept-only row (1, 0, ..., 0).
struct NieQuery {
  double s = 1.0;
  double s_star = 0.0;
  std::vector<double> x;
};

// Original-sample fits and the derived quantities entering the adaptive
// statistic. Coefficient orders follow the shared design builders:
// alpha model (X..., S), beta model (M, X..., S).
struct GlmComponents {
  GlmScenario scenario = GlmScenario::logistic_outcome;
  LogisticFit alpha_fit;           // M ~ X + S
  LogisticFit beta_fit_logistic;   // Y ~ M + X + S (logistic_outcome)
  LinearFit beta_fit_linear;       // Y ~ M + X + S (linear_outcome)

  double alpha_s = 0.0;
  double beta_m = 0.0;
  double sigma_alpha = 0.0;  // sqrt(n)-scale standard errors
  double sigma_beta = 0.0;
  double t_alpha = 0.0;
  double t_beta = 0.0;

  double d_alpha = 0.0;  // g(alpha_S s + x'a_X) - g(alpha_S s* + x'a_X)
  double d_beta = 0.0;   // g(beta_M + x'b_X + tau s) - g(x'b_X + tau s)
  double p_star = 0.0;   // g(x'b_X + tau s)          (logistic_outcome)
  double gamma_hat = 0.0;  // 1 / (p_star (1 - p_star)) (logistic_outcome)

  std::vector<double> w_alpha;  // gradient rows of d_alpha / d_beta in the
  std::vector<double> w_beta;   // fitted coefficients, at the original fit

  double nie = 0.0;
};

// Fits both models and assembles the plug-in quantities at the query.
// Requires one binary mediator; a binary outcome iff logistic_outcome.
GlmComponents glm_components(const Dataset& data, GlmScenario scenario,
                             const NieQuery& query);

// Conditional log odds-ratio NIE from logistic-outcome components:
// P_i = g(i alpha_S + x'a_X) d_beta + P_*, NIE = l(P_s) - l(P_{s*}).
// Exact zero when alpha_s or beta_m is exactly zero. Throws
// ProbabilityBoundary when any probability is within 1e-12 of {0, 1}.
double nie_logistic_outcome(const GlmComponents& components,
                            const NieQuery& query);

// Mean-difference NIE from linear-outcome components:
// beta_M {g(alpha_S s + x'a_X) - g(alpha_S s* + x'a_X)}.
double nie_linear_outcome(const GlmComponents& components,
                          const NieQuery& query);

struct GlmConfig {
  AbConfig ab;  // lambda, local offsets, bootstrap settings, decision levels
  // Coefficient-specific threshold scales; unset means use ab.lambda for
  // both. Exposed as a replication knob: published calibrations thresholded
  // the two t statistics at different scales.
  std::optional<double> lambda_alpha;
  std::optional<double> lambda_beta;
};

// Adaptive bootstrap test of the NIE. Per replicate both models are refit
// on the resample; the statistic is the classical delta NIE* - NIE-hat
// unless all four t statistics fall below their thresholds, in which case
// a local score expansion (divided by n) replaces it. With lambda = 0 the
// result matches classical_glm_test bit for bit under the same seed.
TestResult adaptive_glm_test(const Dataset& data, GlmScenario scenario,
                             const NieQuery& query, const GlmConfig& config);

// Classical nonparametric bootstrap of the NIE; same replicate acceptance
// rules, threshold never engages.
TestResult classical_glm_test(const Dataset& data, GlmScenario scenario,
                              const NieQuery& query, const GlmConfig& config);

namespace detail {

// One replicate of the GLM kernel, exposed for validation. The score-form
// increments z_alpha / z_beta approximate sqrt(n) times the change in the
// plug-in contrasts under the resample (exactly so for the linear-outcome
// z_beta), which the probe's refit quantities let tests verify.
struct GlmReplicateProbe {
  double nie_star = 0.0;
  double alpha_s_star = 0.0;  // refit headline coefficients
  double beta_m_star = 0.0;
  double d_alpha_star = 0.0;  // refit plug-in contrasts at the query
  double d_beta_star = 0.0;   // logistic_outcome only
  double z_alpha = 0.0;
  double z_beta = 0.0;
  double gamma_star = 0.0;  // logistic_outcome only, else 1
  bool local_branch = false;
  double value = 0.0;
};

std::optional<GlmReplicateProbe> probe_glm_replicate(const Dataset& data,
                                                     GlmScenario scenario,
                                                     const NieQuery& query,
                                                     const GlmConfig& config,
                                                     int replicate_index);

}  // namespace detail

}  // namespace medboot
