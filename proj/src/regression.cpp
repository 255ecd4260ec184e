#include "medboot/regression.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "medboot/errors.hpp"
#include "medboot/kernels.hpp"

namespace medboot {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kDegenerateRel = 1e-12;

Eigen::MatrixXd to_matrix(const Columns& cols, std::size_t n) {
  Eigen::MatrixXd a(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) a(i, j) = (*cols[j])[i];
  }
  return a;
}

// Thin SVD least squares with a rank/condition guard. Also reports the
// inverse Gram diagonal, from which per-coefficient v-moments follow.
struct SvdSolve {
  Eigen::VectorXd coef;
  Eigen::VectorXd inv_gram_diag;
};

SvdSolve svd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0) || smax / smin > kConditionLimit) {
    throw_error(ErrorKind::singular_design,
                "design condition number exceeds 1e12");
  }
  SvdSolve out;
  out.coef = svd.solve(y);
  const Eigen::MatrixXd& v = svd.matrixV();
  out.inv_gram_diag.resize(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double acc = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double r = v(j, k) / s(k);
      acc += r * r;
    }
    out.inv_gram_diag(j) = acc;
  }
  return out;
}

LinearFit ols_fit_impl(const Columns& design, const std::vector<double>& response) {
  const std::size_t n = response.size();
  const std::size_t p = design.size();
  if (n <= p) {
    throw_error(ErrorKind::input_error,
                "need more rows than regression parameters");
  }
  const Eigen::MatrixXd a = to_matrix(design, n);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(response.data(), n);
  const SvdSolve sol = svd_solve(a, y);

  LinearFit fit;
  fit.coefficients.assign(sol.coef.data(), sol.coef.data() + p);
  fit.residuals = response;
  for (std::size_t j = 0; j < p; ++j) {
    kernels::axpy_neg(fit.residuals.data(), design[j]->data(),
                      fit.coefficients[j], n);
  }
  fit.rss_mean = kernels::sumsq(fit.residuals.data(), n) / static_cast<double>(n);

  fit.v_moment.resize(p);
  fit.sigma_hat.resize(p);
  fit.se.resize(p);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < p; ++j) {
    // 1 / (n * [ (D'D)^-1 ]_jj) equals the mean squared projected regressor.
    fit.v_moment[j] = 1.0 / (static_cast<double>(n) * sol.inv_gram_diag(j));
    fit.sigma_hat[j] = std::sqrt(fit.rss_mean / fit.v_moment[j]);
    fit.se[j] = fit.sigma_hat[j] / sqrt_n;
  }
  return fit;
}

double column_scale(const std::vector<double>& col) {
  return kernels::sumsq(col.data(), col.size()) / static_cast<double>(col.size());
}

}  // namespace

FwlResult fwl_project(const std::vector<double>& target, const Columns& adjusters) {
  const std::size_t n = target.size();
  const Eigen::MatrixXd a = to_matrix(adjusters, n);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(target.data(), n);
  const SvdSolve sol = svd_solve(a, y);

  FwlResult out;
  out.coefficients.assign(sol.coef.data(), sol.coef.data() + adjusters.size());
  out.projected = target;
  for (std::size_t j = 0; j < adjusters.size(); ++j) {
    kernels::axpy_neg(out.projected.data(), adjusters[j]->data(),
                      out.coefficients[j], n);
  }
  return out;
}

LinearFit ols_fit(const Columns& design, const std::vector<double>& response) {
  return ols_fit_impl(design, response);
}

Columns covariate_design(const Dataset& data) {
  Columns cols;
  for (const auto& x : data.covariates) cols.push_back(&x);
  return cols;
}

Columns covariate_exposure_design(const Dataset& data) {
  Columns cols = covariate_design(data);
  cols.push_back(&data.exposure);
  return cols;
}

Columns mediator_design(const Dataset& data) {
  return covariate_exposure_design(data);
}

Columns outcome_design(const Dataset& data) {
  Columns cols;
  for (const auto& m : data.mediators) cols.push_back(&m);
  for (const auto& x : data.covariates) cols.push_back(&x);
  cols.push_back(&data.exposure);
  return cols;
}

LinearFit fit_ols(const Dataset& data, LinearModel model,
                  std::size_t mediator_index) {
  if (model == LinearModel::mediator) {
    if (mediator_index >= data.j()) {
      throw_error(ErrorKind::input_error, "mediator index out of range");
    }
    // A constant (or covariate-determined) exposure leaves nothing to
    // identify the exposure coefficient; flag it before the collinear full
    // design can trip the singularity guard.
    const FwlResult s = fwl_project(data.exposure, covariate_design(data));
    const double v_s = column_scale(s.projected);
    if (!(v_s > kDegenerateRel * column_scale(data.exposure))) {
      throw_error(ErrorKind::degenerate_response,
                  "exposure has (near-)zero variation after adjusting for "
                  "the covariates");
    }
    return ols_fit_impl(mediator_design(data), data.mediators[mediator_index]);
  }
  // Outcome model: the full-design rank check runs first (exactly duplicated
  // columns are a design error), then each mediator's projected second
  // moment is screened for near-degeneracy.
  LinearFit fit = ols_fit_impl(outcome_design(data), data.outcome);
  for (std::size_t k = 0; k < data.j(); ++k) {
    if (!(fit.v_moment[k] > kDegenerateRel * column_scale(data.mediators[k]))) {
      throw_error(ErrorKind::degenerate_response,
                  "mediator has (near-)zero variation after adjusting for "
                  "the other regressors");
    }
  }
  return fit;
}

ProjectionSet project_single(const Dataset& data, std::size_t mediator_index) {
  if (mediator_index >= data.j()) {
    throw_error(ErrorKind::input_error, "mediator index out of range");
  }
  const Columns x = covariate_design(data);
  const Columns xs = covariate_exposure_design(data);
  const auto& m = data.mediators[mediator_index];

  ProjectionSet ps;
  FwlResult r = fwl_project(data.exposure, x);
  ps.s_perp = std::move(r.projected);
  ps.q1_s = std::move(r.coefficients);
  r = fwl_project(m, x);
  ps.m_perp = std::move(r.projected);
  ps.q1_m = std::move(r.coefficients);
  r = fwl_project(m, xs);
  ps.m_perp_prime = std::move(r.projected);
  ps.q2_m = std::move(r.coefficients);
  r = fwl_project(data.outcome, xs);
  ps.y_perp_prime = std::move(r.projected);
  ps.q2_y = std::move(r.coefficients);
  return ps;
}

LogisticFit logistic_fit(const Columns& design, const std::vector<double>& response,
                         const LogisticOptions& opts) {
  const std::size_t n = response.size();
  const std::size_t p = design.size();
  if (n <= p) {
    throw_error(ErrorKind::input_error,
                "need more rows than regression parameters");
  }
  for (double y : response) {
    if (y != 0.0 && y != 1.0) {
      throw_error(ErrorKind::input_error,
                  "logistic response must be coded 0/1");
    }
  }
  const Eigen::MatrixXd a = to_matrix(design, n);
  {
    // Rank guard on the unweighted design.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 0) || s(0) / s(s.size() - 1) > kConditionLimit) {
      throw_error(ErrorKind::singular_design,
                  "logistic design condition number exceeds 1e12");
    }
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(response.data(), n);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd g(n), w(n);
  LogisticFit fit;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd eta = a * beta;
    for (std::size_t i = 0; i < n; ++i) {
      g(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      w(i) = g(i) * (1.0 - g(i));
    }
    const Eigen::MatrixXd info = a.transpose() * w.asDiagonal() * a;
    const Eigen::VectorXd score = a.transpose() * (y - g);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw_error(ErrorKind::singular_design,
                  "weighted Gram matrix is not positive definite");
    }
    const Eigen::VectorXd delta = ldlt.solve(score);
    beta += delta;
    fit.iterations = iter;
    for (std::size_t jc = 0; jc < p; ++jc) {
      if (std::fabs(beta(jc)) > 30.0) {
        throw_error(ErrorKind::separation_suspected,
                    "coefficient magnitude exceeded 30 during IRLS; the "
                    "classes are likely separable");
      }
    }
    if (delta.cwiseAbs().maxCoeff() <= opts.tol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) {
    throw_error(ErrorKind::non_convergence,
                "IRLS did not converge within max_iter iterations");
  }

  const Eigen::VectorXd eta = a * beta;
  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.fitted_probs.resize(n);
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = 1.0 / (1.0 + std::exp(-eta(i)));
    fit.fitted_probs[i] = gi;
    if (!(gi > 0.0) || !(gi < 1.0)) {
      throw_error(ErrorKind::separation_suspected,
                  "fitted probability reached 0 or 1");
    }
    info += gi * (1.0 - gi) * a.row(i).transpose() * a.row(i);
  }
  info /= static_cast<double>(n);
  fit.info_matrix.resize(p * p);
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) fit.info_matrix[r * p + c] = info(r, c);
  }
  return fit;
}

double logistic_sigma(const LogisticFit& fit, std::size_t j) {
  const std::size_t p = fit.coefficients.size();
  Eigen::MatrixXd info(p, p);
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) info(r, c) = fit.info_matrix[r * p + c];
  }
  const Eigen::MatrixXd inv = info.inverse();
  return std::sqrt(inv(j, j));
}

}  // namespace medboot
