#include "medboot/linear_ab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <utility>

#include <Eigen/Dense>

#include "medboot/errors.hpp"
#include "medboot/kernels.hpp"
#include "medboot/stats.hpp"

namespace medboot {

double threshold_lambda_n(double lambda, std::int64_t n) {
  if (!(lambda >= 0.0))
    throw_error(ErrorKind::input_error, "lambda must be >= 0");
  if (n < 2)
    throw_error(ErrorKind::input_error, "threshold needs n >= 2");
  const double nn = static_cast<double>(n);
  return lambda * std::sqrt(nn) / std::log(nn);
}

double h_statistic(double t1, double t2) {
  return std::fabs(t1) <= std::fabs(t2) ? t1 : t2;
}

std::pair<int, int> h_select(double t1, double t2) {
  return std::fabs(t1) <= std::fabs(t2) ? std::make_pair(1, 0)
                                        : std::make_pair(0, 1);
}

void validate_omegas(const std::vector<double>& omegas) {
  for (double w : omegas)
    if (!(w > 0.0 && w < 1.0))
      throw_error(ErrorKind::input_error,
                  "decision levels must lie strictly inside (0,1)");
}

std::vector<Decision> make_decisions(const std::vector<double>& omegas,
                                     double p) {
  std::vector<Decision> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back({w, p <= w});
  return out;
}

namespace {

constexpr double kDegenerateRel = 1e-12;

double centered_mean_square(const std::vector<double>& col) {
  const double n = static_cast<double>(col.size());
  double mean = 0.0;
  for (double v : col) mean += v;
  mean /= n;
  double acc = 0.0;
  for (double v : col) acc += (v - mean) * (v - mean);
  return acc / n;
}

// The t statistic needs a residual scale that is meaningfully positive: a
// perfect fit leaves only rounding noise in the residuals, so the scale is
// compared to the response spread rather than to exact zero.
void require_positive_scale(double sigma, double rss_mean,
                            const std::vector<double>& response,
                            const char* model) {
  if (std::isfinite(sigma) && sigma > 0.0 &&
      rss_mean > kDegenerateRel * centered_mean_square(response))
    return;
  throw_error(ErrorKind::degenerate_response,
              std::string(model) +
                  "-model residual scale is zero or lost to rounding; the t "
                  "statistic is undefined");
}

enum class Family { poc, js, joint };

// Original-data fits, projections, and centering constants shared by every
// replicate of one bootstrap run.
struct Context {
  Dataset data;  // mediators in canonical order for the joint family
  std::size_t n = 0;
  std::size_t nj = 0;  // mediator count
  std::size_t p0 = 0;  // covariate columns (incl. intercept slot)
  BootstrapScheme scheme = BootstrapScheme::pairs;
  Family family = Family::poc;
  bool classical_only = false;

  std::vector<double> alpha, sig_a, t_a;
  std::vector<double> beta, sig_b, t_b;
  std::vector<std::vector<double>> eps_m;
  std::vector<double> eps_y;

  std::vector<double> s_perp;
  std::vector<std::vector<double>> m_perp;        // per mediator, on X
  std::vector<std::vector<double>> m_perp_prime;  // per mediator, on (X,S)
  std::vector<double> y_perp_prime;
  double v_s = 0.0;           // mean squared s_perp
  std::vector<double> v_m;    // mean squared m_perp_prime, per mediator

  // The population-side term of the bootstrap empirical process is an exact
  // zero in exact arithmetic (the residuals are orthogonal to every column
  // entering the projection), but it is evaluated and subtracted anyway so
  // the draws follow the defining formula, not a simplification of it.
  // Pairs scheme: per replicate the term is
  //   (dot(eps, S) - sum_k q*_k dot(eps, X_k)) / n
  // with q* the replicate's projection coefficients, so only the dot
  // products below are precomputed.
  std::vector<double> ems_dot;               // dot(eps_m_j, S)
  std::vector<std::vector<double>> emx_dot;  // dot(eps_m_j, X_k)
  std::vector<double> eym_dot;               // dot(eps_y, M_j)
  std::vector<double> eyxs_dot;              // dot(eps_y, X_k)..., dot(eps_y, S)
  // Projected scheme: fixed projections make the term a constant.
  std::vector<double> center_a;  // dot(eps_m_j, s_perp) / n
  std::vector<double> center_b;  // dot(eps_y, m_perp_prime_j) / n

  double lambda_n = 0.0;
  std::vector<double> b_a, b_b;
  double product = 0.0;       // alpha^T beta
  double theta_scaled = 0.0;  // H(t_a, t_b), js family
  double js_center = 0.0;     // H(b_a/sig_a, b_b/sig_b), js family
  double sqn = 0.0;
};

struct Replicate {
  double value = 0.0;
  bool local = false;
};

std::vector<std::size_t> canonical_order(
    const std::vector<std::vector<double>>& cols) {
  std::vector<std::size_t> idx(cols.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&cols](std::size_t a, std::size_t b) {
                     return std::lexicographical_compare(
                         cols[a].begin(), cols[a].end(), cols[b].begin(),
                         cols[b].end());
                   });
  return idx;
}

std::vector<double> resolve_b(const std::vector<double>& b, std::size_t nj,
                              const char* name) {
  if (b.empty()) return std::vector<double>(nj, 0.0);
  if (b.size() != nj)
    throw_error(ErrorKind::input_error,
                std::string(name) + " must be empty or have one entry per "
                "mediator");
  return b;
}

Context build_context(const Dataset& input, const AbConfig& cfg,
                      Family family, bool classical_only) {
  validate_omegas(cfg.omega_grid);
  if (family != Family::joint && input.j() != 1)
    throw_error(ErrorKind::input_error,
                "this method requires exactly one mediator");

  Context ctx;
  ctx.data = input;
  if (family == Family::joint && ctx.data.j() > 1) {
    auto order = canonical_order(ctx.data.mediators);
    std::vector<std::vector<double>> med(order.size());
    std::vector<std::string> names(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      med[k] = std::move(ctx.data.mediators[order[k]]);
      names[k] = std::move(ctx.data.mediator_names[order[k]]);
    }
    ctx.data.mediators = std::move(med);
    ctx.data.mediator_names = std::move(names);
    // Local offsets follow their mediators through the reorder.
    if (!cfg.b_alpha.empty() || !cfg.b_beta.empty()) {
      auto ba = resolve_b(cfg.b_alpha, order.size(), "b_alpha");
      auto bb = resolve_b(cfg.b_beta, order.size(), "b_beta");
      ctx.b_a.resize(order.size());
      ctx.b_b.resize(order.size());
      for (std::size_t k = 0; k < order.size(); ++k) {
        ctx.b_a[k] = ba[order[k]];
        ctx.b_b[k] = bb[order[k]];
      }
    }
  }

  const Dataset& d = ctx.data;
  d.validate();
  ctx.n = static_cast<std::size_t>(d.n);
  ctx.nj = d.j();
  ctx.p0 = d.covariates.size();
  ctx.scheme = cfg.bootstrap.scheme;
  ctx.family = family;
  ctx.classical_only = classical_only;
  ctx.sqn = std::sqrt(static_cast<double>(ctx.n));
  ctx.lambda_n = threshold_lambda_n(cfg.lambda, d.n);
  if (ctx.b_a.empty()) ctx.b_a = resolve_b(cfg.b_alpha, ctx.nj, "b_alpha");
  if (ctx.b_b.empty()) ctx.b_b = resolve_b(cfg.b_beta, ctx.nj, "b_beta");

  const std::size_t n = ctx.n;
  const std::size_t nj = ctx.nj;

  ctx.alpha.resize(nj);
  ctx.sig_a.resize(nj);
  ctx.t_a.resize(nj);
  ctx.eps_m.resize(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    auto fit = fit_ols(d, LinearModel::mediator, j);
    ctx.alpha[j] = fit.coefficients.back();
    ctx.sig_a[j] = fit.sigma_hat.back();
    ctx.eps_m[j] = std::move(fit.residuals);
    require_positive_scale(ctx.sig_a[j], fit.rss_mean, d.mediators[j],
                           "mediator");
    ctx.t_a[j] = ctx.sqn * ctx.alpha[j] / ctx.sig_a[j];
  }
  {
    auto fit = fit_ols(d, LinearModel::outcome);
    ctx.beta.assign(fit.coefficients.begin(), fit.coefficients.begin() + nj);
    ctx.sig_b.assign(fit.sigma_hat.begin(), fit.sigma_hat.begin() + nj);
    ctx.eps_y = std::move(fit.residuals);
    ctx.t_b.resize(nj);
    for (std::size_t j = 0; j < nj; ++j) {
      require_positive_scale(ctx.sig_b[j], fit.rss_mean, d.outcome,
                             "outcome");
      ctx.t_b[j] = ctx.sqn * ctx.beta[j] / ctx.sig_b[j];
    }
  }

  const auto cov = covariate_design(d);
  const auto cov_s = covariate_exposure_design(d);
  ctx.s_perp = fwl_project(d.exposure, cov).projected;
  ctx.m_perp.resize(nj);
  ctx.m_perp_prime.resize(nj);
  ctx.v_m.resize(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    ctx.m_perp[j] = fwl_project(d.mediators[j], cov).projected;
    ctx.m_perp_prime[j] = fwl_project(d.mediators[j], cov_s).projected;
    ctx.v_m[j] = kernels::sumsq(ctx.m_perp_prime[j].data(), n) /
                 static_cast<double>(n);
  }
  ctx.y_perp_prime = fwl_project(d.outcome, cov_s).projected;
  ctx.v_s =
      kernels::sumsq(ctx.s_perp.data(), n) / static_cast<double>(n);

  ctx.ems_dot.resize(nj);
  ctx.emx_dot.resize(nj);
  ctx.eym_dot.resize(nj);
  ctx.center_a.resize(nj);
  ctx.center_b.resize(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    ctx.ems_dot[j] =
        kernels::dot(ctx.eps_m[j].data(), d.exposure.data(), n);
    ctx.emx_dot[j].resize(ctx.p0);
    for (std::size_t k = 0; k < ctx.p0; ++k)
      ctx.emx_dot[j][k] =
          kernels::dot(ctx.eps_m[j].data(), d.covariates[k].data(), n);
    ctx.eym_dot[j] =
        kernels::dot(ctx.eps_y.data(), d.mediators[j].data(), n);
    ctx.center_a[j] = kernels::dot(ctx.eps_m[j].data(), ctx.s_perp.data(), n) /
                      static_cast<double>(n);
    ctx.center_b[j] =
        kernels::dot(ctx.eps_y.data(), ctx.m_perp_prime[j].data(), n) /
        static_cast<double>(n);
  }
  ctx.eyxs_dot.resize(ctx.p0 + 1);
  for (std::size_t k = 0; k < ctx.p0; ++k)
    ctx.eyxs_dot[k] =
        kernels::dot(ctx.eps_y.data(), d.covariates[k].data(), n);
  ctx.eyxs_dot[ctx.p0] =
      kernels::dot(ctx.eps_y.data(), d.exposure.data(), n);

  ctx.product = 0.0;
  for (std::size_t j = 0; j < nj; ++j) ctx.product += ctx.alpha[j] * ctx.beta[j];
  if (family == Family::js) {
    ctx.theta_scaled = h_statistic(ctx.t_a[0], ctx.t_b[0]);
    ctx.js_center =
        h_statistic(ctx.b_a[0] / ctx.sig_a[0], ctx.b_b[0] / ctx.sig_b[0]);
  }
  return ctx;
}

// Per-replicate quantities both schemes produce before the branch decision.
struct Core {
  std::vector<double> alpha_star, sig_a_star;
  std::vector<double> beta_star, sig_b_star;
  std::vector<double> z_s, z_m;
};

// The branch between the classical delta and the local expansion. The two
// arms are selected, not blended, so the lambda = 0 run of the adaptive
// test is bit-identical to the plain classical bootstrap.
std::optional<Replicate> finish_replicate(const Context& ctx, const Core& c,
                                          detail::ReplicateProbe* probe) {
  const std::size_t nj = ctx.nj;
  bool local = false;
  if (!ctx.classical_only) {
    local = true;
    for (std::size_t j = 0; j < nj && local; ++j) {
      const double ta_star = ctx.sqn * c.alpha_star[j] / c.sig_a_star[j];
      const double tb_star = ctx.sqn * c.beta_star[j] / c.sig_b_star[j];
      const bool all_small =
          std::fabs(ctx.t_a[j]) <= ctx.lambda_n &&
          std::fabs(ctx.t_b[j]) <= ctx.lambda_n &&
          std::fabs(ta_star) <= ctx.lambda_n &&
          std::fabs(tb_star) <= ctx.lambda_n;
      if (!all_small) local = false;
    }
  }

  double value = 0.0;
  if (ctx.family == Family::js) {
    if (local) {
      const double k_s = (ctx.b_a[0] + c.z_s[0]) / c.sig_a_star[0];
      const double k_m = (ctx.b_b[0] + c.z_m[0]) / c.sig_b_star[0];
      value = h_statistic(k_s, k_m) - ctx.js_center;
    } else {
      const double ta_star = ctx.sqn * c.alpha_star[0] / c.sig_a_star[0];
      const double tb_star = ctx.sqn * c.beta_star[0] / c.sig_b_star[0];
      value = h_statistic(ta_star, tb_star) - ctx.theta_scaled;
    }
  } else {
    if (local) {
      double term = 0.0;
      for (std::size_t j = 0; j < nj; ++j)
        term += ctx.b_a[j] * c.z_m[j] + ctx.b_b[j] * c.z_s[j] +
                c.z_s[j] * c.z_m[j];
      value = term / static_cast<double>(ctx.n);
    } else {
      double prod_star = 0.0;
      for (std::size_t j = 0; j < nj; ++j)
        prod_star += c.alpha_star[j] * c.beta_star[j];
      value = prod_star - ctx.product;
    }
  }
  if (!std::isfinite(value)) return std::nullopt;
  if (probe) {
    probe->alpha_star = c.alpha_star;
    probe->beta_star = c.beta_star;
    probe->z_s = c.z_s;
    probe->z_m = c.z_m;
    probe->local_branch = local;
    probe->value = value;
  }
  return Replicate{value, local};
}

std::optional<Replicate> replicate_pairs(const Context& ctx, rng::Engine& e,
                                         detail::ReplicateProbe* probe) {
  const std::size_t n = ctx.n;
  const std::size_t nj = ctx.nj;
  const std::size_t p0 = ctx.p0;
  const double nn = static_cast<double>(n);
  const Dataset& d = ctx.data;

  const auto idx = draw_pair_indices(d.n, e);
  auto pick = [&](const std::vector<double>& col) {
    std::vector<double> out(n);
    kernels::gather(out.data(), col.data(), idx.data(), n);
    return out;
  };

  std::vector<std::vector<double>> gx(p0);
  for (std::size_t k = 0; k < p0; ++k) gx[k] = pick(d.covariates[k]);
  const auto gs = pick(d.exposure);
  const auto gy = pick(d.outcome);
  std::vector<std::vector<double>> gm(nj), gem(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    gm[j] = pick(d.mediators[j]);
    gem[j] = pick(ctx.eps_m[j]);
  }
  const auto gey = pick(ctx.eps_y);

  Columns xcols;
  xcols.reserve(p0);
  for (const auto& col : gx) xcols.push_back(&col);

  // Resampled exposure projection (for the score terms and their scale).
  const auto sproj = fwl_project(gs, xcols);
  const double v_s_star = kernels::sumsq(sproj.projected.data(), n) / nn;
  if (!(v_s_star > kDegenerateRel * ctx.v_s)) return std::nullopt;

  Core c;
  c.alpha_star.resize(nj);
  c.sig_a_star.resize(nj);
  c.z_s.resize(nj);
  c.z_m.resize(nj);

  // Mediator refits; their residuals are the resampled projected mediators.
  Columns med_design = xcols;
  med_design.push_back(&gs);
  std::vector<std::vector<double>> med_resid(nj);
  std::vector<std::vector<double>> med_coefs(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    auto fit = ols_fit(med_design, gm[j]);
    c.alpha_star[j] = fit.coefficients.back();
    c.sig_a_star[j] = fit.sigma_hat.back();
    if (!(c.sig_a_star[j] > 0.0)) return std::nullopt;
    med_resid[j] = std::move(fit.residuals);
    med_coefs[j] = std::move(fit.coefficients);
  }

  // Outcome refit.
  Columns out_design;
  out_design.reserve(nj + p0 + 1);
  for (const auto& col : gm) out_design.push_back(&col);
  for (const auto* col : xcols) out_design.push_back(col);
  out_design.push_back(&gs);
  {
    auto fit = ols_fit(out_design, gy);
    c.beta_star.assign(fit.coefficients.begin(),
                       fit.coefficients.begin() + nj);
    c.sig_b_star.assign(fit.sigma_hat.begin(), fit.sigma_hat.begin() + nj);
    for (std::size_t j = 0; j < nj; ++j)
      if (!(c.sig_b_star[j] > 0.0)) return std::nullopt;
  }

  // Exposure-side score terms.
  for (std::size_t j = 0; j < nj; ++j) {
    double boot_mean =
        kernels::dot(gem[j].data(), sproj.projected.data(), n) / nn;
    double center = ctx.ems_dot[j];
    for (std::size_t k = 0; k < p0; ++k)
      center -= sproj.coefficients[k] * ctx.emx_dot[j][k];
    center /= nn;
    c.z_s[j] = ctx.sqn * (boot_mean - center) / v_s_star;
  }

  // Mediator-side score terms.
  std::vector<double> num(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    double boot_mean = kernels::dot(gey.data(), med_resid[j].data(), n) / nn;
    double center = ctx.eym_dot[j];
    for (std::size_t k = 0; k < p0 + 1; ++k)
      center -= med_coefs[j][k] * ctx.eyxs_dot[k];
    center /= nn;
    num[j] = ctx.sqn * (boot_mean - center);
  }
  if (nj == 1) {
    const double v_m_star = kernels::sumsq(med_resid[0].data(), n) / nn;
    if (!(v_m_star > kDegenerateRel * ctx.v_m[0])) return std::nullopt;
    c.z_m[0] = num[0] / v_m_star;
  } else {
    Eigen::MatrixXd gram(nj, nj);
    for (std::size_t a = 0; a < nj; ++a) {
      for (std::size_t b = a; b < nj; ++b) {
        double g = kernels::dot(med_resid[a].data(), med_resid[b].data(), n) / nn;
        gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
        gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = g;
      }
      if (!(gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) >
            kDegenerateRel * ctx.v_m[a]))
        return std::nullopt;
    }
    Eigen::Map<const Eigen::VectorXd> rhs(num.data(),
                                          static_cast<Eigen::Index>(nj));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd sol = ldlt.solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    for (std::size_t j = 0; j < nj; ++j)
      c.z_m[j] = sol(static_cast<Eigen::Index>(j));
  }

  return finish_replicate(ctx, c, probe);
}

std::optional<Replicate> replicate_projected(const Context& ctx,
                                             rng::Engine& e,
                                             detail::ReplicateProbe* probe) {
  const std::size_t n = ctx.n;
  const std::size_t nj = ctx.nj;
  const double nn = static_cast<double>(n);

  const auto idx = draw_pair_indices(static_cast<std::int64_t>(n), e);
  auto pick = [&](const std::vector<double>& col) {
    std::vector<double> out(n);
    kernels::gather(out.data(), col.data(), idx.data(), n);
    return out;
  };

  const auto gsp = pick(ctx.s_perp);
  const auto gypp = pick(ctx.y_perp_prime);
  const auto gey = pick(ctx.eps_y);
  std::vector<std::vector<double>> gmp(nj), gmpp(nj), gem(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    gmp[j] = pick(ctx.m_perp[j]);
    gmpp[j] = pick(ctx.m_perp_prime[j]);
    gem[j] = pick(ctx.eps_m[j]);
  }

  const double v_s_star = kernels::sumsq(gsp.data(), n) / nn;
  if (!(v_s_star > kDegenerateRel * ctx.v_s)) return std::nullopt;

  Core c;
  c.alpha_star.resize(nj);
  c.sig_a_star.resize(nj);
  c.beta_star.resize(nj);
  c.sig_b_star.resize(nj);
  c.z_s.resize(nj);
  c.z_m.resize(nj);

  // Exposure-side through-origin refits on the projected rows.
  std::vector<double> resid(n);
  for (std::size_t j = 0; j < nj; ++j) {
    c.alpha_star[j] =
        kernels::dot(gsp.data(), gmp[j].data(), n) / (nn * v_s_star);
    for (std::size_t i = 0; i < n; ++i)
      resid[i] = gmp[j][i] - c.alpha_star[j] * gsp[i];
    const double rss = kernels::sumsq(resid.data(), n) / nn;
    c.sig_a_star[j] = std::sqrt(rss / v_s_star);
    if (!(c.sig_a_star[j] > 0.0)) return std::nullopt;
  }

  // Outcome-side refit on the projected rows.
  std::vector<double> num(nj);
  if (nj == 1) {
    const double v_m_star = kernels::sumsq(gmpp[0].data(), n) / nn;
    if (!(v_m_star > kDegenerateRel * ctx.v_m[0])) return std::nullopt;
    c.beta_star[0] =
        kernels::dot(gmpp[0].data(), gypp.data(), n) / (nn * v_m_star);
    for (std::size_t i = 0; i < n; ++i)
      resid[i] = gypp[i] - c.beta_star[0] * gmpp[0][i];
    const double rss = kernels::sumsq(resid.data(), n) / nn;
    c.sig_b_star[0] = std::sqrt(rss / v_m_star);
    if (!(c.sig_b_star[0] > 0.0)) return std::nullopt;

    c.z_s[0] = ctx.sqn *
               (kernels::dot(gem[0].data(), gsp.data(), n) / nn -
                ctx.center_a[0]) /
               v_s_star;
    num[0] = ctx.sqn * (kernels::dot(gey.data(), gmpp[0].data(), n) / nn -
                        ctx.center_b[0]);
    c.z_m[0] = num[0] / v_m_star;
  } else {
    Eigen::MatrixXd gram(nj, nj);
    Eigen::VectorXd rhs(nj);
    for (std::size_t a = 0; a < nj; ++a) {
      for (std::size_t b = a; b < nj; ++b) {
        double g = kernels::dot(gmpp[a].data(), gmpp[b].data(), n) / nn;
        gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
        gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = g;
      }
      if (!(gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) >
            kDegenerateRel * ctx.v_m[a]))
        return std::nullopt;
      rhs(static_cast<Eigen::Index>(a)) =
          kernels::dot(gmpp[a].data(), gypp.data(), n) / nn;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    Eigen::MatrixXd gram_inv =
        ldlt.solve(Eigen::MatrixXd::Identity(nj, nj));
    if (!gram_inv.allFinite()) return std::nullopt;
    Eigen::VectorXd beta = gram_inv * rhs;

    for (std::size_t i = 0; i < n; ++i) {
      double fitted = 0.0;
      for (std::size_t j = 0; j < nj; ++j)
        fitted += beta(static_cast<Eigen::Index>(j)) * gmpp[j][i];
      resid[i] = gypp[i] - fitted;
    }
    const double rss = kernels::sumsq(resid.data(), n) / nn;
    for (std::size_t j = 0; j < nj; ++j) {
      c.beta_star[j] = beta(static_cast<Eigen::Index>(j));
      c.sig_b_star[j] = std::sqrt(
          rss * gram_inv(static_cast<Eigen::Index>(j),
                         static_cast<Eigen::Index>(j)));
      if (!(c.sig_b_star[j] > 0.0)) return std::nullopt;
    }

    Eigen::VectorXd numv(nj);
    for (std::size_t j = 0; j < nj; ++j) {
      c.z_s[j] = ctx.sqn *
                 (kernels::dot(gem[j].data(), gsp.data(), n) / nn -
                  ctx.center_a[j]) /
                 v_s_star;
      numv(static_cast<Eigen::Index>(j)) =
          ctx.sqn * (kernels::dot(gey.data(), gmpp[j].data(), n) / nn -
                     ctx.center_b[j]);
    }
    Eigen::VectorXd zm = gram_inv * numv;
    if (!zm.allFinite()) return std::nullopt;
    for (std::size_t j = 0; j < nj; ++j)
      c.z_m[j] = zm(static_cast<Eigen::Index>(j));
  }

  return finish_replicate(ctx, c, probe);
}

std::optional<Replicate> run_replicate(const Context& ctx, rng::Engine& e,
                                       detail::ReplicateProbe* probe) {
  return ctx.scheme == BootstrapScheme::pairs
             ? replicate_pairs(ctx, e, probe)
             : replicate_projected(ctx, e, probe);
}

TestResult run_linear_test(const Dataset& data, const AbConfig& cfg,
                           Family family, bool classical_only,
                           const char* tag) {
  Context ctx = build_context(data, cfg, family, classical_only);
  std::atomic<long> local_count{0};
  auto closure = [&ctx, &local_count](rng::Engine& e) -> std::optional<double> {
    auto rep = run_replicate(ctx, e, nullptr);
    if (!rep) return std::nullopt;
    if (rep->local) local_count.fetch_add(1, std::memory_order_relaxed);
    return rep->value;
  };
  auto dist = run_bootstrap(cfg.bootstrap, tag, closure);

  const double observed =
      family == Family::js ? ctx.theta_scaled : ctx.product;
  TestResult result;
  result.method = tag;
  result.estimate =
      family == Family::js ? ctx.theta_scaled / ctx.sqn : ctx.product;
  result.p_value = two_sided_pvalue(dist, observed);
  result.indicator_rate = static_cast<double>(local_count.load()) /
                          static_cast<double>(cfg.bootstrap.b);
  result.decisions = make_decisions(cfg.omega_grid, result.p_value);
  result.distribution = std::move(dist);
  return result;
}

TestResult plugin_result(const char* tag, double estimate, double p,
                         const std::vector<double>& omegas) {
  TestResult result;
  result.method = tag;
  result.estimate = estimate;
  result.p_value = p;
  result.decisions = make_decisions(omegas, p);
  result.distribution.method = tag;
  result.distribution.config.b = 0;
  return result;
}

}  // namespace

PocComponents poc_components(const Dataset& data) {
  if (data.j() != 1)
    throw_error(ErrorKind::input_error,
                "product-of-coefficients components require one mediator");
  data.validate();
  PocComponents out;
  auto med = fit_ols(data, LinearModel::mediator);
  auto outc = fit_ols(data, LinearModel::outcome);
  out.alpha_hat = med.coefficients.back();
  out.beta_hat = outc.coefficients.front();
  out.sigma_alpha = med.sigma_hat.back();
  out.sigma_beta = outc.sigma_hat.front();
  require_positive_scale(out.sigma_alpha, med.rss_mean, data.mediators[0],
                         "mediator");
  require_positive_scale(out.sigma_beta, outc.rss_mean, data.outcome,
                         "outcome");
  const double sqn = std::sqrt(static_cast<double>(data.n));
  out.t_alpha = sqn * out.alpha_hat / out.sigma_alpha;
  out.t_beta = sqn * out.beta_hat / out.sigma_beta;
  out.projections = project_single(data);
  out.eps_m = std::move(med.residuals);
  out.eps_y = std::move(outc.residuals);
  return out;
}

TestResult sobel_test(const PocComponents& c,
                      const std::vector<double>& omega_grid) {
  validate_omegas(omega_grid);
  const double n = static_cast<double>(c.eps_m.size());
  const double se_a = c.sigma_alpha / std::sqrt(n);
  const double se_b = c.sigma_beta / std::sqrt(n);
  const double numerator = c.alpha_hat * c.beta_hat;
  const double denom = std::sqrt(c.beta_hat * c.beta_hat * se_a * se_a +
                                 c.alpha_hat * c.alpha_hat * se_b * se_b);
  double z = 0.0;
  if (denom > 0.0) {
    z = numerator / denom;
  } else if (numerator != 0.0) {
    throw_error(ErrorKind::degenerate_response,
                "delta-method scale is zero with a nonzero product");
  }
  return plugin_result("poc-sobel", numerator, stats::normal_two_sided_p(z),
                       omega_grid);
}

TestResult adaptive_poc_test(const Dataset& data, const AbConfig& config) {
  return run_linear_test(data, config, Family::poc, false, "poc-ab");
}

TestResult classical_poc_test(const Dataset& data, const AbConfig& config) {
  return run_linear_test(data, config, Family::poc, true, "poc-b");
}

JsComponents js_components(const PocComponents& c) {
  JsComponents out;
  out.t_alpha = c.t_alpha;
  out.t_beta = c.t_beta;
  out.theta_scaled = h_statistic(c.t_alpha, c.t_beta);
  auto sel = h_select(c.t_alpha, c.t_beta);
  out.sel_alpha = sel.first;
  out.sel_beta = sel.second;
  return out;
}

TestResult maxp_test(const PocComponents& c,
                     const std::vector<double>& omega_grid) {
  validate_omegas(omega_grid);
  const double p =
      std::max(stats::normal_two_sided_p(c.t_alpha),
                 stats::normal_two_sided_p(c.t_beta));
  const double n = static_cast<double>(c.eps_m.size());
  const double estimate = h_statistic(c.t_alpha, c.t_beta) / std::sqrt(n);
  return plugin_result("js-maxp", estimate, p, omega_grid);
}

TestResult adaptive_js_test(const Dataset& data, const AbConfig& config) {
  return run_linear_test(data, config, Family::js, false, "js-ab");
}

TestResult classical_js_test(const Dataset& data, const AbConfig& config) {
  return run_linear_test(data, config, Family::js, true, "js-b");
}

JointComponents joint_components(const Dataset& data) {
  data.validate();
  const std::size_t nj = data.j();
  const double sqn = std::sqrt(static_cast<double>(data.n));
  JointComponents out;
  out.alpha_vec.resize(nj);
  out.sigma_alpha_vec.resize(nj);
  out.t_alpha_vec.resize(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    auto fit = fit_ols(data, LinearModel::mediator, j);
    out.alpha_vec[j] = fit.coefficients.back();
    out.sigma_alpha_vec[j] = fit.sigma_hat.back();
    require_positive_scale(out.sigma_alpha_vec[j], fit.rss_mean,
                           data.mediators[j], "mediator");
    out.t_alpha_vec[j] = sqn * out.alpha_vec[j] / out.sigma_alpha_vec[j];
  }
  auto fit = fit_ols(data, LinearModel::outcome);
  out.beta_vec.assign(fit.coefficients.begin(), fit.coefficients.begin() + nj);
  out.sigma_beta_vec.assign(fit.sigma_hat.begin(),
                            fit.sigma_hat.begin() + nj);
  out.t_beta_vec.resize(nj);
  out.product = 0.0;
  for (std::size_t j = 0; j < nj; ++j) {
    require_positive_scale(out.sigma_beta_vec[j], fit.rss_mean, data.outcome,
                           "outcome");
    out.t_beta_vec[j] = sqn * out.beta_vec[j] / out.sigma_beta_vec[j];
    out.product += out.alpha_vec[j] * out.beta_vec[j];
  }
  return out;
}

TestResult adaptive_joint_test(const Dataset& data, const AbConfig& config) {
  return run_linear_test(data, config, Family::joint, false, "joint-ab");
}

TestResult classical_joint_test(const Dataset& data, const AbConfig& config) {
  return run_linear_test(data, config, Family::joint, true, "joint-b");
}

TestResult individual_within_multi_test(const Dataset& data,
                                        std::size_t target,
                                        const AbConfig& config) {
  if (data.j() < 2)
    throw_error(ErrorKind::input_error,
                "per-mediator testing needs at least two mediators");
  if (target >= data.j())
    throw_error(ErrorKind::input_error, "mediator index out of range");

  // Remaining mediators become outcome-model covariates, after X.
  std::vector<std::vector<double>> extra;
  std::vector<std::string> extra_names;
  for (std::size_t k = 1; k < data.covariates.size(); ++k) {
    extra.push_back(data.covariates[k]);
    extra_names.push_back(data.covariate_names[k]);
  }
  for (std::size_t j = 0; j < data.j(); ++j) {
    if (j == target) continue;
    extra.push_back(data.mediators[j]);
    extra_names.push_back(data.mediator_names[j]);
  }
  Dataset derived =
      make_dataset(data.exposure, {data.mediators[target]}, data.outcome,
                   std::move(extra), {data.mediator_names[target]},
                   std::move(extra_names));
  derived.exposure_name = data.exposure_name;
  derived.outcome_name = data.outcome_name;

  TestResult result = adaptive_poc_test(derived, config);
  result.target = static_cast<int>(target);
  return result;
}

namespace detail {

std::optional<ReplicateProbe> probe_linear_replicate(const Dataset& data,
                                                     const AbConfig& config,
                                                     int replicate_index) {
  const Family family = data.j() == 1 ? Family::poc : Family::joint;
  Context ctx = build_context(data, config, family, false);
  const std::uint64_t replicate_seed = rng::derive_seed(
      config.bootstrap.seed, static_cast<std::uint64_t>(replicate_index));
  rng::Engine engine(rng::derive_seed(replicate_seed, 0));
  ReplicateProbe probe;
  auto rep = run_replicate(ctx, engine, &probe);
  if (!rep) return std::nullopt;
  return probe;
}

}  // namespace detail

}  // namespace medboot
