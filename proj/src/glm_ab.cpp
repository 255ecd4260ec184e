#include "medboot/glm_ab.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "medboot/errors.hpp"
#include "medboot/kernels.hpp"
#include "medboot/resampling.hpp"
#include "medboot/rng.hpp"

namespace medboot {

const char* glm_scenario_name(GlmScenario scenario) {
  return scenario == GlmScenario::logistic_outcome ? "glm1" : "glm2";
}

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kDegenerateRel = 1e-12;

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_deriv(double x) {
  const double g = logistic(x);
  return g * (1.0 - g);
}

double logit_interior(double p, const char* what) {
  if (!(p > kBoundaryTol) || !(p < 1.0 - kBoundaryTol))
    throw_error(ErrorKind::probability_boundary,
                std::string(what) + " probability sits within 1e-12 of 0 or "
                                    "1; the log odds are unusable");
  return std::log(p / (1.0 - p));
}

// x' c over the covariate block of a coefficient vector starting at offset.
double covariate_dot(const std::vector<double>& coefs, std::size_t offset,
                     const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += coefs[offset + k] * x[k];
  return acc;
}

// Conditional log odds-ratio NIE from logistic alpha and beta coefficient
// vectors (orders (X..., S) and (M, X..., S)). Written so that alpha_S = 0
// or beta_M = 0 produce exact zeros.
double nie_log_or(const std::vector<double>& a, const std::vector<double>& b,
                  const NieQuery& q) {
  const double xa = covariate_dot(a, 0, q.x);
  const double alpha_s = a.back();
  const double xb = covariate_dot(b, 1, q.x);
  const double tau = b.back();
  const double beta_m = b.front();

  const double mu0 = xb + tau * q.s;
  const double p_star = logistic(mu0);
  const double d_beta = logistic(beta_m + mu0) - logistic(mu0);
  const double p_s = logistic(alpha_s * q.s + xa) * d_beta + p_star;
  const double p_ss = logistic(alpha_s * q.s_star + xa) * d_beta + p_star;
  return logit_interior(p_s, "NIE") - logit_interior(p_ss, "NIE");
}

// Mean-difference NIE: beta_M {g(alpha_S s + x'a_X) - g(alpha_S s* + x'a_X)}.
double nie_mean_diff(const std::vector<double>& a, double beta_m,
                     const NieQuery& q) {
  const double xa = covariate_dot(a, 0, q.x);
  const double alpha_s = a.back();
  const double d_alpha =
      logistic(alpha_s * q.s + xa) - logistic(alpha_s * q.s_star + xa);
  return beta_m * d_alpha;
}

void require_binary(const std::vector<double>& col, const char* role) {
  for (double v : col)
    if (v != 0.0 && v != 1.0)
      throw_error(ErrorKind::input_error,
                  std::string(role) + " must be coded 0/1 for this scenario");
}

// Everything shared by the replicates of one bootstrap run.
struct GlmContext {
  const Dataset* data = nullptr;
  GlmScenario scenario = GlmScenario::logistic_outcome;
  NieQuery query;  // x resolved to full covariate length
  bool classical_only = false;

  std::size_t n = 0;
  std::size_t p0 = 0;  // covariate columns incl. intercept slot
  double sqn = 0.0;
  double lam_a_n = 0.0, lam_b_n = 0.0;
  double b_a = 0.0, b_b = 0.0;
  double d_ba = 0.0, d_bb = 0.0;  // local drift constants, original fit

  GlmComponents comp;

  std::vector<double> resid_a;        // M - g_alpha at the original fit
  std::vector<double> resid_b;        // Y - g_beta (logistic_outcome)
  std::vector<double> score_a_mean;   // P_n{(M - g_a) D_a}
  std::vector<double> score_b_mean;   // P_n{(Y - g_b) D_b}

  // linear_outcome centering pieces for the score form of z_beta
  std::vector<double> eps_y;       // linear outcome residuals
  double eym_dot = 0.0;            // eps_y . M
  std::vector<double> eyxs_dot;    // eps_y . D_k over D = (X..., S)
  double v_m = 0.0;                // P_n(M_perp_prime^2), degeneracy reference
};

double resolve_local_offset(const std::vector<double>& b, const char* name) {
  if (b.empty()) return 0.0;
  if (b.size() != 1)
    throw_error(ErrorKind::input_error,
                std::string(name) + " must hold at most one entry for the "
                                    "single-mediator GLM tests");
  if (!std::isfinite(b[0]))
    throw_error(ErrorKind::input_error,
                std::string(name) + " must be finite");
  return b[0];
}

GlmContext build_glm_context(const Dataset& data, GlmScenario scenario,
                             const NieQuery& query, const GlmConfig& cfg,
                             bool classical_only) {
  validate_omegas(cfg.ab.omega_grid);
  data.validate();
  if (data.j() != 1)
    throw_error(ErrorKind::input_error,
                "the GLM tests require exactly one mediator");
  if (cfg.ab.bootstrap.scheme != BootstrapScheme::pairs)
    throw_error(ErrorKind::input_error,
                "the projected resampling scheme applies to the linear "
                "kernels only; GLM replicates refit on pairs resamples");

  GlmContext ctx;
  ctx.data = &data;
  ctx.scenario = scenario;
  ctx.classical_only = classical_only;
  ctx.n = static_cast<std::size_t>(data.n);
  ctx.p0 = data.covariates.size();
  ctx.sqn = std::sqrt(static_cast<double>(ctx.n));

  require_binary(data.mediators[0], "the mediator");
  if (scenario == GlmScenario::logistic_outcome)
    require_binary(data.outcome, "the outcome");

  ctx.query = query;
  if (ctx.query.x.empty()) {
    ctx.query.x.assign(ctx.p0, 0.0);
    ctx.query.x[0] = 1.0;  // intercept slot
  }
  if (ctx.query.x.size() != ctx.p0)
    throw_error(ErrorKind::input_error,
                "the query covariate row must match the covariate count "
                "(including the intercept slot)");
  for (double v : ctx.query.x)
    if (!std::isfinite(v))
      throw_error(ErrorKind::input_error,
                  "query covariate values must be finite");
  if (!std::isfinite(ctx.query.s) || !std::isfinite(ctx.query.s_star) ||
      ctx.query.s == ctx.query.s_star)
    throw_error(ErrorKind::input_error,
                "the exposure contrast needs two distinct finite levels");

  ctx.b_a = resolve_local_offset(cfg.ab.b_alpha, "b_alpha");
  ctx.b_b = resolve_local_offset(cfg.ab.b_beta, "b_beta");
  const double lam_a = cfg.lambda_alpha.value_or(cfg.ab.lambda);
  const double lam_b = cfg.lambda_beta.value_or(cfg.ab.lambda);
  ctx.lam_a_n = threshold_lambda_n(lam_a, data.n);
  ctx.lam_b_n = threshold_lambda_n(lam_b, data.n);

  GlmComponents& c = ctx.comp;
  c.scenario = scenario;
  const auto da_cols = mediator_design(data);
  c.alpha_fit = logistic_fit(da_cols, data.mediators[0]);
  c.alpha_s = c.alpha_fit.coefficients.back();
  c.sigma_alpha = logistic_sigma(c.alpha_fit, ctx.p0);
  c.t_alpha = ctx.sqn * c.alpha_s / c.sigma_alpha;

  const auto db_cols = outcome_design(data);
  if (scenario == GlmScenario::logistic_outcome) {
    c.beta_fit_logistic = logistic_fit(db_cols, data.outcome);
    c.beta_m = c.beta_fit_logistic.coefficients.front();
    c.sigma_beta = logistic_sigma(c.beta_fit_logistic, 0);
  } else {
    c.beta_fit_linear = fit_ols(data, LinearModel::outcome);
    c.beta_m = c.beta_fit_linear.coefficients.front();
    c.sigma_beta = c.beta_fit_linear.sigma_hat.front();
    double mean = 0.0, cms = 0.0;
    for (double y : data.outcome) mean += y;
    mean /= static_cast<double>(ctx.n);
    for (double y : data.outcome) cms += (y - mean) * (y - mean);
    cms /= static_cast<double>(ctx.n);
    if (!(c.sigma_beta > 0.0) ||
        !(c.beta_fit_linear.rss_mean > kDegenerateRel * cms))
      throw_error(ErrorKind::degenerate_response,
                  "outcome-model residual scale is zero or lost to "
                  "rounding; the t statistic is undefined");
  }
  if (!std::isfinite(c.sigma_alpha) || !(c.sigma_alpha > 0.0) ||
      !std::isfinite(c.sigma_beta) || !(c.sigma_beta > 0.0))
    throw_error(ErrorKind::degenerate_response,
                "a coefficient scale is unusable; the t statistics are "
                "undefined");
  c.t_beta = ctx.sqn * c.beta_m / c.sigma_beta;

  // Plug-in contrasts and gradient rows at the original fit.
  const NieQuery& q = ctx.query;
  const auto& a = c.alpha_fit.coefficients;
  const double xa = covariate_dot(a, 0, q.x);
  c.d_alpha = logistic(c.alpha_s * q.s + xa) -
              logistic(c.alpha_s * q.s_star + xa);
  const double gpa_s = logistic_deriv(c.alpha_s * q.s + xa);
  const double gpa_ss = logistic_deriv(c.alpha_s * q.s_star + xa);
  c.w_alpha.assign(ctx.p0 + 1, 0.0);
  for (std::size_t k = 0; k < ctx.p0; ++k)
    c.w_alpha[k] = (gpa_s - gpa_ss) * q.x[k];
  c.w_alpha[ctx.p0] = gpa_s * q.s - gpa_ss * q.s_star;

  if (scenario == GlmScenario::logistic_outcome) {
    const auto& b = c.beta_fit_logistic.coefficients;
    const double xb = covariate_dot(b, 1, q.x);
    const double tau = b.back();
    const double mu0 = xb + tau * q.s;
    c.p_star = logistic(mu0);
    if (!(c.p_star > kBoundaryTol) || !(c.p_star < 1.0 - kBoundaryTol))
      throw_error(ErrorKind::probability_boundary,
                  "the reference probability sits within 1e-12 of 0 or 1");
    c.gamma_hat = 1.0 / (c.p_star * (1.0 - c.p_star));
    c.d_beta = logistic(c.beta_m + mu0) - logistic(mu0);
    const double gpb1 = logistic_deriv(c.beta_m + mu0);
    const double gpb0 = logistic_deriv(mu0);
    c.w_beta.assign(ctx.p0 + 2, 0.0);
    c.w_beta[0] = gpb1;
    for (std::size_t k = 0; k < ctx.p0; ++k)
      c.w_beta[1 + k] = (gpb1 - gpb0) * q.x[k];
    c.w_beta[ctx.p0 + 1] = (gpb1 - gpb0) * q.s;
    c.nie = nie_log_or(a, b, q);
  } else {
    c.nie = nie_mean_diff(a, c.beta_m, q);
  }

  // Local drift constants at the original fit.
  ctx.d_ba = logistic_deriv(xa) * (q.s - q.s_star) * ctx.b_a;
  if (scenario == GlmScenario::logistic_outcome) {
    const auto& b = c.beta_fit_logistic.coefficients;
    const double xb = covariate_dot(b, 1, q.x);
    const double tau = b.back();
    ctx.d_bb = logistic_deriv(xb + tau * q.s) * (q.s - q.s_star) * ctx.b_b;
  }

  // Original score means (zero at the optimum up to solver tolerance) and
  // residuals feeding the bootstrap score increments.
  ctx.resid_a.resize(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i)
    ctx.resid_a[i] = data.mediators[0][i] - c.alpha_fit.fitted_probs[i];
  ctx.score_a_mean.assign(da_cols.size(), 0.0);
  for (std::size_t k = 0; k < da_cols.size(); ++k)
    ctx.score_a_mean[k] =
        kernels::dot(ctx.resid_a.data(), da_cols[k]->data(), ctx.n) /
        static_cast<double>(ctx.n);

  if (scenario == GlmScenario::logistic_outcome) {
    ctx.resid_b.resize(ctx.n);
    for (std::size_t i = 0; i < ctx.n; ++i)
      ctx.resid_b[i] = data.outcome[i] - c.beta_fit_logistic.fitted_probs[i];
    ctx.score_b_mean.assign(db_cols.size(), 0.0);
    for (std::size_t k = 0; k < db_cols.size(); ++k)
      ctx.score_b_mean[k] =
          kernels::dot(ctx.resid_b.data(), db_cols[k]->data(), ctx.n) /
          static_cast<double>(ctx.n);
  } else {
    ctx.eps_y = c.beta_fit_linear.residuals;
    ctx.eym_dot = kernels::dot(ctx.eps_y.data(), data.mediators[0].data(),
                               ctx.n);
    const auto ds_cols = covariate_exposure_design(data);
    ctx.eyxs_dot.assign(ds_cols.size(), 0.0);
    for (std::size_t k = 0; k < ds_cols.size(); ++k)
      ctx.eyxs_dot[k] =
          kernels::dot(ctx.eps_y.data(), ds_cols[k]->data(), ctx.n);
    const auto proj = project_single(data);
    ctx.v_m = kernels::sumsq(proj.m_perp_prime.data(), ctx.n) /
              static_cast<double>(ctx.n);
  }
  return ctx;
}

// W* (info*)^-1 G*_n(score) with the information and score taken over the
// resampled rows at the ORIGINAL fitted probabilities, and the gradient row
// W* at the refit coefficients.
double score_increment(const GlmContext& ctx, const Columns& original_cols,
                       const std::vector<double>& resid,
                       const std::vector<double>& g_orig,
                       const std::vector<double>& score_mean,
                       const std::vector<double>& w_star,
                       const std::vector<std::int32_t>& idx) {
  const std::size_t p = original_cols.size();
  const std::size_t n = ctx.n;
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
  std::vector<double> row(p);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = static_cast<std::size_t>(idx[r]);
    for (std::size_t k = 0; k < p; ++k) row[k] = (*original_cols[k])[i];
    const double w = g_orig[i] * (1.0 - g_orig[i]);
    const double e = resid[i];
    for (std::size_t k = 0; k < p; ++k) {
      score(static_cast<Eigen::Index>(k)) += e * row[k];
      for (std::size_t l = k; l < p; ++l)
        info(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) +=
            w * row[k] * row[l];
    }
  }
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < p; ++k) {
    score(static_cast<Eigen::Index>(k)) =
        score(static_cast<Eigen::Index>(k)) / dn - score_mean[k];
    for (std::size_t l = k; l < p; ++l) {
      info(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) /= dn;
      info(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) =
          info(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  if (ldlt.info() != Eigen::Success)
    throw_error(ErrorKind::singular_design,
                "resampled information matrix is not factorizable");
  Eigen::VectorXd sol = ldlt.solve(ctx.sqn * score);
  if (!sol.allFinite())
    throw_error(ErrorKind::singular_design,
                "resampled information matrix is numerically singular");
  double out = 0.0;
  for (std::size_t k = 0; k < p; ++k)
    out += w_star[k] * sol(static_cast<Eigen::Index>(k));
  return out;
}

struct GlmRep {
  double value = 0.0;
  bool local = false;
};

std::optional<GlmRep> run_glm_replicate(const GlmContext& ctx,
                                        rng::Engine& e,
                                        detail::GlmReplicateProbe* probe) {
  const Dataset& d = *ctx.data;
  const std::size_t n = ctx.n;
  const std::size_t p0 = ctx.p0;
  const auto idx = draw_pair_indices(static_cast<std::int64_t>(n), e);

  std::vector<double> gs(n), gm(n), gy(n);
  kernels::gather(gs.data(), d.exposure.data(), idx.data(), n);
  kernels::gather(gm.data(), d.mediators[0].data(), idx.data(), n);
  kernels::gather(gy.data(), d.outcome.data(), idx.data(), n);
  std::vector<std::vector<double>> gx(p0, std::vector<double>(n));
  for (std::size_t k = 0; k < p0; ++k)
    kernels::gather(gx[k].data(), d.covariates[k].data(), idx.data(), n);

  Columns da_cols;
  da_cols.reserve(p0 + 1);
  for (std::size_t k = 0; k < p0; ++k) da_cols.push_back(&gx[k]);
  da_cols.push_back(&gs);

  const auto afit = logistic_fit(da_cols, gm);
  const double as_star = afit.coefficients.back();
  const double sig_a_star = logistic_sigma(afit, p0);

  Columns db_cols;
  db_cols.reserve(p0 + 2);
  db_cols.push_back(&gm);
  for (std::size_t k = 0; k < p0; ++k) db_cols.push_back(&gx[k]);
  db_cols.push_back(&gs);

  LogisticFit bfit;
  LinearFit blin;
  double bm_star = 0.0, sig_b_star = 0.0, nie_star = 0.0;
  if (ctx.scenario == GlmScenario::logistic_outcome) {
    bfit = logistic_fit(db_cols, gy);
    bm_star = bfit.coefficients.front();
    sig_b_star = logistic_sigma(bfit, 0);
    nie_star = nie_log_or(afit.coefficients, bfit.coefficients, ctx.query);
  } else {
    blin = ols_fit(db_cols, gy);
    bm_star = blin.coefficients.front();
    sig_b_star = blin.sigma_hat.front();
    nie_star = nie_mean_diff(afit.coefficients, bm_star, ctx.query);
  }
  if (!std::isfinite(sig_a_star) || !(sig_a_star > 0.0) ||
      !std::isfinite(sig_b_star) || !(sig_b_star > 0.0))
    return std::nullopt;

  const double delta = nie_star - ctx.comp.nie;
  const double t_a_star = ctx.sqn * as_star / sig_a_star;
  const double t_b_star = ctx.sqn * bm_star / sig_b_star;
  const bool local =
      !ctx.classical_only && std::fabs(t_a_star) <= ctx.lam_a_n &&
      std::fabs(ctx.comp.t_alpha) <= ctx.lam_a_n &&
      std::fabs(t_b_star) <= ctx.lam_b_n &&
      std::fabs(ctx.comp.t_beta) <= ctx.lam_b_n;

  double value = delta;
  double z_a = 0.0, z_b = 0.0;
  double gamma_star =
      ctx.scenario == GlmScenario::logistic_outcome ? 0.0 : 1.0;
  if (local || probe) {
    const auto da_orig = mediator_design(d);
    std::vector<double> wa_star(p0 + 1, 0.0);
    {
      const auto& a = afit.coefficients;
      const double xa = covariate_dot(a, 0, ctx.query.x);
      const double gps = logistic_deriv(as_star * ctx.query.s + xa);
      const double gpss = logistic_deriv(as_star * ctx.query.s_star + xa);
      for (std::size_t k = 0; k < p0; ++k)
        wa_star[k] = (gps - gpss) * ctx.query.x[k];
      wa_star[p0] = gps * ctx.query.s - gpss * ctx.query.s_star;
    }
    z_a = score_increment(ctx, da_orig, ctx.resid_a,
                          ctx.comp.alpha_fit.fitted_probs, ctx.score_a_mean,
                          wa_star, idx);

    double local_term = 0.0;
    if (ctx.scenario == GlmScenario::logistic_outcome) {
      const auto db_orig = outcome_design(d);
      std::vector<double> wb_star(p0 + 2, 0.0);
      const auto& b = bfit.coefficients;
      const double xb = covariate_dot(b, 1, ctx.query.x);
      const double tau = b.back();
      const double mu0 = xb + tau * ctx.query.s;
      const double gp1 = logistic_deriv(bm_star + mu0);
      const double gp0 = logistic_deriv(mu0);
      wb_star[0] = gp1;
      for (std::size_t k = 0; k < p0; ++k)
        wb_star[1 + k] = (gp1 - gp0) * ctx.query.x[k];
      wb_star[p0 + 1] = (gp1 - gp0) * ctx.query.s;
      z_b = score_increment(ctx, db_orig, ctx.resid_b,
                            ctx.comp.beta_fit_logistic.fitted_probs,
                            ctx.score_b_mean, wb_star, idx);
      const double p_ss = logistic(mu0);
      if (!(p_ss > kBoundaryTol) || !(p_ss < 1.0 - kBoundaryTol))
        throw_error(ErrorKind::probability_boundary,
                    "resampled reference probability sits within 1e-12 of 0 "
                    "or 1");
      gamma_star = 1.0 / (p_ss * (1.0 - p_ss));
      local_term = (ctx.d_ba * z_b + ctx.d_bb * z_a + z_a * z_b) * gamma_star;
    } else {
      // Linear-model score form for z_beta on the resample.
      Columns ds_cols;
      ds_cols.reserve(p0 + 1);
      for (std::size_t k = 0; k < p0; ++k) ds_cols.push_back(&gx[k]);
      ds_cols.push_back(&gs);
      const auto proj = fwl_project(gm, ds_cols);
      const double v_m_star =
          kernels::sumsq(proj.projected.data(), n) / static_cast<double>(n);
      if (!(v_m_star > kDegenerateRel * ctx.v_m)) return std::nullopt;
      double center = ctx.eym_dot;
      for (std::size_t k = 0; k < proj.coefficients.size(); ++k)
        center -= proj.coefficients[k] * ctx.eyxs_dot[k];
      center /= static_cast<double>(n);
      std::vector<double> geps(n);
      kernels::gather(geps.data(), ctx.eps_y.data(), idx.data(), n);
      const double num =
          kernels::dot(geps.data(), proj.projected.data(), n) /
              static_cast<double>(n) -
          center;
      z_b = ctx.sqn * num / v_m_star;
      local_term = ctx.d_ba * z_b + ctx.b_b * z_a + z_a * z_b;
    }
    if (local) value = local_term / static_cast<double>(n);
  }
  if (!std::isfinite(value)) return std::nullopt;

  if (probe) {
    probe->nie_star = nie_star;
    probe->alpha_s_star = as_star;
    probe->beta_m_star = bm_star;
    const double xa_star = covariate_dot(afit.coefficients, 0, ctx.query.x);
    probe->d_alpha_star = logistic(as_star * ctx.query.s + xa_star) -
                          logistic(as_star * ctx.query.s_star + xa_star);
    if (ctx.scenario == GlmScenario::logistic_outcome) {
      const double mu0 =
          covariate_dot(bfit.coefficients, 1, ctx.query.x) +
          bfit.coefficients.back() * ctx.query.s;
      probe->d_beta_star = logistic(bm_star + mu0) - logistic(mu0);
    }
    probe->z_alpha = z_a;
    probe->z_beta = z_b;
    probe->gamma_star = gamma_star;
    probe->local_branch = local;
    probe->value = value;
  }
  return GlmRep{value, local};
}

TestResult run_glm_test(const Dataset& data, GlmScenario scenario,
                        const NieQuery& query, const GlmConfig& cfg,
                        bool classical_only, const std::string& tag) {
  GlmContext ctx =
      build_glm_context(data, scenario, query, cfg, classical_only);
  std::atomic<long> local_count{0};
  auto closure = [&ctx, &local_count](rng::Engine& e) -> std::optional<double> {
    auto rep = run_glm_replicate(ctx, e, nullptr);
    if (!rep) return std::nullopt;
    if (rep->local) local_count.fetch_add(1, std::memory_order_relaxed);
    return rep->value;
  };
  auto dist = run_bootstrap(cfg.ab.bootstrap, tag, closure);

  TestResult result;
  result.method = tag;
  result.estimate = ctx.comp.nie;
  result.p_value = two_sided_pvalue(dist, ctx.comp.nie);
  result.indicator_rate = static_cast<double>(local_count.load()) /
                          static_cast<double>(cfg.ab.bootstrap.b);
  result.decisions = make_decisions(cfg.ab.omega_grid, result.p_value);
  result.distribution = std::move(dist);
  return result;
}

}  // namespace

GlmComponents glm_components(const Dataset& data, GlmScenario scenario,
                             const NieQuery& query) {
  GlmConfig cfg;  // defaults are enough to assemble components
  return build_glm_context(data, scenario, query, cfg, false).comp;
}

double nie_logistic_outcome(const GlmComponents& components,
                            const NieQuery& query) {
  if (components.scenario != GlmScenario::logistic_outcome)
    throw_error(ErrorKind::input_error,
                "log odds-ratio NIE needs logistic-outcome components");
  NieQuery q = query;
  if (q.x.empty()) {
    q.x.assign(components.alpha_fit.coefficients.size() - 1, 0.0);
    q.x[0] = 1.0;
  }
  return nie_log_or(components.alpha_fit.coefficients,
                    components.beta_fit_logistic.coefficients, q);
}

double nie_linear_outcome(const GlmComponents& components,
                          const NieQuery& query) {
  if (components.scenario != GlmScenario::linear_outcome)
    throw_error(ErrorKind::input_error,
                "mean-difference NIE needs linear-outcome components");
  NieQuery q = query;
  if (q.x.empty()) {
    q.x.assign(components.alpha_fit.coefficients.size() - 1, 0.0);
    q.x[0] = 1.0;
  }
  return nie_mean_diff(components.alpha_fit.coefficients, components.beta_m,
                       q);
}

TestResult adaptive_glm_test(const Dataset& data, GlmScenario scenario,
                             const NieQuery& query, const GlmConfig& config) {
  const std::string tag = std::string(glm_scenario_name(scenario)) + "-ab";
  return run_glm_test(data, scenario, query, config, false, tag);
}

TestResult classical_glm_test(const Dataset& data, GlmScenario scenario,
                              const NieQuery& query, const GlmConfig& config) {
  const std::string tag = std::string(glm_scenario_name(scenario)) + "-b";
  return run_glm_test(data, scenario, query, config, true, tag);
}

namespace detail {

std::optional<GlmReplicateProbe> probe_glm_replicate(const Dataset& data,
                                                     GlmScenario scenario,
                                                     const NieQuery& query,
                                                     const GlmConfig& config,
                                                     int replicate_index) {
  GlmContext ctx = build_glm_context(data, scenario, query, config, false);
  const std::uint64_t replicate_seed = rng::derive_seed(
      config.ab.bootstrap.seed, static_cast<std::uint64_t>(replicate_index));
  rng::Engine e(rng::derive_seed(replicate_seed, 0));
  GlmReplicateProbe probe;
  auto rep = run_glm_replicate(ctx, e, &probe);
  if (!rep) return std::nullopt;
  return probe;
}

}  // namespace detail

}  // namespace medboot
