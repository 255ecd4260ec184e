#pragma once

#include <cstddef>
#include <vector>

#include "medboot/dataset.hpp"

// Linear-model fitting via least squares with Frisch-Waugh-Lovell
// projections, and binary-logistic fitting via iteratively reweighted least
// squares. All scale estimates divide by n (not n - p): sigma_j^2 =
// mean(residual^2) / v_j with v_j the mean squared projected regressor,
// which is what the bootstrap statistics downstream are calibrated against.

namespace medboot {

using Columns = std::vector<const std::vector<double>*>;

struct FwlResult {
  std::vector<double> projected;     // target minus its LS fit on adjusters
  std::vector<double> coefficients;  // one per adjuster column
};

// Residualizes target on the adjuster columns. Throws SingularDesign when
// the adjuster block's condition number exceeds 1e12.
FwlResult fwl_project(const std::vector<double>& target,
                      const Columns& adjusters);

struct LinearFit {
  std::vector<double> coefficients;
  std::vector<double> residuals;
  std::vector<double> sigma_hat;  // sqrt(mean(res^2) / v_moment_j)
  std::vector<double> se;         // sigma_hat_j / sqrt(n)
  std::vector<double> v_moment;   // mean squared projected regressor
  double rss_mean = 0.0;          // mean(res^2)
};

// Least squares of `response` on `design` columns. v_moment is computed from
// the inverse Gram diagonal, which equals the mean squared FWL-projected
// regressor. Throws SingularDesign past condition 1e12.
LinearFit ols_fit(const Columns& design, const std::vector<double>& response);

enum class LinearModel { mediator, outcome };

// Mediator model: M_j ~ X + S, coefficient order (X..., S).
// Outcome model:  Y ~ M_1..M_J + X + S, coefficient order (M..., X..., S).
// The mediator model guards against a degenerate exposure (projected second
// moment below 1e-12 of the column scale); the outcome model guards the
// projected mediator block the same way.
LinearFit fit_ols(const Dataset& data, LinearModel model,
                  std::size_t mediator_index = 0);

struct ProjectionSet {
  std::vector<double> s_perp;        // S residualized on X
  std::vector<double> m_perp;        // M residualized on X
  std::vector<double> m_perp_prime;  // M residualized on (X, S)
  std::vector<double> y_perp_prime;  // Y residualized on (X, S)
  std::vector<double> q1_s;          // S-on-X projection coefficients
  std::vector<double> q1_m;          // M-on-X
  std::vector<double> q2_m;          // M-on-(X,S)
  std::vector<double> q2_y;          // Y-on-(X,S)
};

// The four projections used by the single-mediator statistics (J must be 1
// unless `mediator_index` selects a column of a wider dataset).
ProjectionSet project_single(const Dataset& data, std::size_t mediator_index = 0);

struct LogisticOptions {
  int max_iter = 100;
  double tol = 1e-8;  // max-abs coefficient change
};

struct LogisticFit {
  std::vector<double> coefficients;
  std::vector<double> fitted_probs;
  std::vector<double> info_matrix;  // row-major p x p: mean g(1-g) d d^T
  bool converged = false;
  int iterations = 0;
};

// Binary-logistic ML fit from a zero start. Response values must be 0 or 1.
// Throws SeparationSuspected when any |coefficient| exceeds 30 during
// iteration, NonConvergence past max_iter, SingularDesign for a rank-
// deficient design or weighted Gram.
LogisticFit logistic_fit(const Columns& design,
                         const std::vector<double>& response,
                         const LogisticOptions& opts = {});

// Model-based scale of coefficient j: sqrt([info^-1]_jj); the t statistic is
// sqrt(n) * coef_j / scale_j.
double logistic_sigma(const LogisticFit& fit, std::size_t j);

// Design column sets used by both the linear and logistic mediation models.
Columns mediator_design(const Dataset& data);              // (X..., S)
Columns outcome_design(const Dataset& data);               // (M..., X..., S)
Columns covariate_design(const Dataset& data);             // (X...)
Columns covariate_exposure_design(const Dataset& data);    // (X..., S)

}  // namespace medboot
