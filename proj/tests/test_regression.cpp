#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "medboot/errors.hpp"
#include "medboot/kernels.hpp"
#include "medboot/regression.hpp"
#include "medboot/rng.hpp"
#include "test_support.hpp"

using medboot::Columns;
using medboot::Dataset;
using medboot::LinearModel;

namespace {

const std::vector<double> kIntercept4{1, 1, 1, 1};

}  // namespace

TEST_CASE("fwl_project mean-centers against an intercept") {
  std::vector<double> s{0, 0, 1, 1};
  auto r = medboot::fwl_project(s, Columns{&kIntercept4});
  REQUIRE(r.projected.size() == 4);
  CHECK(r.projected[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.projected[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.projected[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.projected[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.coefficients.size() == 1);
  CHECK(r.coefficients[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fwl_project of a column on itself vanishes") {
  std::vector<double> s{0.3, -1.2, 2.7, 0.9};
  auto r = medboot::fwl_project(s, Columns{&s});
  for (double v : r.projected) CHECK(std::fabs(v) <= 1e-12);
}

TEST_CASE("fwl_project two-column example") {
  std::vector<double> target{1, 2, 3, 5};
  std::vector<double> group{0, 0, 1, 1};
  auto r = medboot::fwl_project(target, Columns{&kIntercept4, &group});
  std::vector<double> want{-0.5, 0.5, -1.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(r.projected[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("fit_ols four-row mediator model matches the hand solution") {
  auto d = medboot::make_dataset({0, 0, 1, 1}, {{1, 2, 3, 5}}, {1, 1, 2, 2});
  auto fit = medboot::fit_ols(d, LinearModel::mediator);
  // Coefficient order (X..., S): intercept then exposure.
  REQUIRE(fit.coefficients.size() == 2);
  CHECK(fit.coefficients[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(fit.coefficients[1] == doctest::Approx(2.5).epsilon(1e-12));
  double sigma_alpha = fit.sigma_hat[1];
  CHECK(sigma_alpha * sigma_alpha == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("constant mediator fits cleanly with zero scale") {
  auto d = medboot::make_dataset({0, 1, 0, 1, 0, 1}, {{3, 3, 3, 3, 3, 3}},
                                 {1, 2, 3, 4, 5, 6});
  auto fit = medboot::fit_ols(d, LinearModel::mediator);
  CHECK(std::fabs(fit.coefficients[1]) <= 1e-12);
  for (double r : fit.residuals) CHECK(std::fabs(r) <= 1e-12);
  CHECK(fit.sigma_hat[1] <= 1e-12);
}

TEST_CASE("duplicated mediator column in the outcome model is singular") {
  std::vector<double> m{0.7, 2.1, -0.4, 1.9, 2.8, 0.1};
  auto d = medboot::make_dataset({0, 1, 0, 1, 1, 0}, {m},
                                 {1.2, 3.9, 0.3, 3.1, 4.6, 0.8}, {m});
  try {
    medboot::fit_ols(d, LinearModel::outcome);
    FAIL("expected SingularDesign");
  } catch (const medboot::Error& err) {
    CHECK(err.kind() == medboot::ErrorKind::singular_design);
  }
}

TEST_CASE("constant exposure is a degenerate mediator-model response") {
  auto d = medboot::make_dataset({1, 1, 1, 1, 1, 1}, {{1, 2, 3, 4, 5, 6}},
                                 {2, 4, 6, 8, 10, 12});
  try {
    medboot::fit_ols(d, LinearModel::mediator);
    FAIL("expected DegenerateResponse");
  } catch (const medboot::Error& err) {
    CHECK(err.kind() == medboot::ErrorKind::degenerate_response);
  }
}

TEST_CASE("six-row fixture reproduces the frozen least-squares oracle") {
  auto d = testsup::poc_fixture();
  testsup::PocOracle want;

  auto med = medboot::fit_ols(d, LinearModel::mediator);
  REQUIRE(med.coefficients.size() == 3);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(testsup::rel_err(med.coefficients[j], want.mediator_coefs[j]) <=
          1e-9);
  CHECK(testsup::rel_err(med.coefficients.back(), want.alpha_hat) <= 1e-9);
  CHECK(testsup::rel_err(med.sigma_hat.back(), want.sigma_alpha) <= 1e-9);

  auto out = medboot::fit_ols(d, LinearModel::outcome);
  REQUIRE(out.coefficients.size() == 4);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(testsup::rel_err(out.coefficients[j], want.outcome_coefs[j]) <=
          1e-9);
  CHECK(testsup::rel_err(out.coefficients[0], want.beta_hat) <= 1e-9);
  CHECK(testsup::rel_err(out.sigma_hat[0], want.sigma_beta) <= 1e-9);

  const double n = static_cast<double>(d.n);
  double t_alpha =
      std::sqrt(n) * med.coefficients.back() / med.sigma_hat.back();
  double t_beta = std::sqrt(n) * out.coefficients[0] / out.sigma_hat[0];
  CHECK(testsup::rel_err(t_alpha, want.t_alpha) <= 1e-9);
  CHECK(testsup::rel_err(t_beta, want.t_beta) <= 1e-9);
}

TEST_CASE("project_single agrees with the fitted coefficients") {
  auto d = testsup::poc_fixture();
  auto proj = medboot::project_single(d);
  auto med = medboot::fit_ols(d, LinearModel::mediator);
  auto out = medboot::fit_ols(d, LinearModel::outcome);

  const auto dot = medboot::kernels::dot;
  const auto sumsq = medboot::kernels::sumsq;
  const std::size_t n = proj.s_perp.size();

  double alpha = dot(proj.s_perp.data(), proj.m_perp.data(), n) /
                 sumsq(proj.s_perp.data(), n);
  double beta = dot(proj.m_perp_prime.data(), proj.y_perp_prime.data(), n) /
                sumsq(proj.m_perp_prime.data(), n);
  CHECK(testsup::rel_err(alpha, med.coefficients.back()) <= 1e-10);
  CHECK(testsup::rel_err(beta, out.coefficients[0]) <= 1e-10);

  // Projected columns are orthogonal to what they were adjusted for.
  auto check_orth = [&](const std::vector<double>& v, const Columns& adj) {
    double vscale = testsup::rms(v);
    for (const auto* a : adj) {
      double ip = dot(v.data(), a->data(), n) / static_cast<double>(n);
      CHECK(std::fabs(ip) <= 1e-10 * std::max(1.0, vscale * testsup::rms(*a)));
    }
  };
  check_orth(proj.s_perp, medboot::covariate_design(d));
  check_orth(proj.m_perp, medboot::covariate_design(d));
  check_orth(proj.m_perp_prime, medboot::covariate_exposure_design(d));
  check_orth(proj.y_perp_prime, medboot::covariate_exposure_design(d));
}

TEST_CASE("full fits and projection ratios agree on random designs") {
  medboot::rng::Engine e(medboot::rng::derive_seed(20260815, 7));
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 12 + e.next_index(49);
    const std::size_t q = e.next_index(4);
    auto d = testsup::random_linear_dataset(e, n, q, 0.8, -0.6);
    auto med = medboot::fit_ols(d, LinearModel::mediator);
    auto out = medboot::fit_ols(d, LinearModel::outcome);
    auto proj = medboot::project_single(d);

    const auto dot = medboot::kernels::dot;
    const auto sumsq = medboot::kernels::sumsq;
    const double nn = static_cast<double>(n);

    // Frisch-Waugh-Lovell: the multi-column coefficient equals the
    // projected-ratio form.
    double v_s = sumsq(proj.s_perp.data(), n) / nn;
    double alpha = dot(proj.s_perp.data(), proj.m_perp.data(), n) / nn / v_s;
    CHECK(testsup::rel_err(alpha, med.coefficients.back()) <= 1e-9);

    double v_m = sumsq(proj.m_perp_prime.data(), n) / nn;
    double beta =
        dot(proj.m_perp_prime.data(), proj.y_perp_prime.data(), n) / nn / v_m;
    CHECK(testsup::rel_err(beta, out.coefficients[0]) <= 1e-9);

    // v_moment from the inverse Gram diagonal equals the projected moment.
    CHECK(testsup::rel_err(med.v_moment.back(), v_s) <= 1e-9);
    CHECK(testsup::rel_err(out.v_moment[0], v_m) <= 1e-9);

    // Residual identity: eps_M = m_perp - alpha * s_perp, elementwise.
    double scale = std::max(testsup::rms(proj.m_perp), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double eps = proj.m_perp[i] - alpha * proj.s_perp[i];
      CHECK(std::fabs(eps - med.residuals[i]) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("logistic fit on a balanced intercept-only design is zero") {
  std::vector<double> ones{1, 1, 1, 1, 1, 1, 1, 1};
  std::vector<double> y{0, 0, 0, 0, 1, 1, 1, 1};
  auto fit = medboot::logistic_fit(Columns{&ones}, y);
  CHECK(fit.converged);
  CHECK(std::fabs(fit.coefficients[0]) <= 1e-12);
  for (double p : fit.fitted_probs) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("logistic fit flags perfect separation") {
  std::vector<double> ones{1, 1, 1, 1, 1, 1, 1, 1};
  std::vector<double> s{0, 1, 0, 1, 1, 0, 1, 0};
  try {
    medboot::logistic_fit(Columns{&ones, &s}, s);
    FAIL("expected SeparationSuspected");
  } catch (const medboot::Error& err) {
    CHECK(err.kind() == medboot::ErrorKind::separation_suspected);
  }
}

TEST_CASE("logistic fit rejects a non-binary response") {
  std::vector<double> ones{1, 1, 1, 1, 1, 1};
  std::vector<double> y{0, 1, 0.5, 1, 0, 1};
  try {
    medboot::logistic_fit(Columns{&ones}, y);
    FAIL("expected InputError");
  } catch (const medboot::Error& err) {
    CHECK(err.kind() == medboot::ErrorKind::input_error);
  }
}

TEST_CASE("eight-row logistic fixture matches the frozen ML oracle") {
  testsup::LogisticFixture fx;
  std::vector<double> ones(fx.s.size(), 1.0);
  Columns design{&ones, &fx.s, &fx.x};
  auto fit = medboot::logistic_fit(design, fx.y);
  REQUIRE(fit.converged);
  REQUIRE(fit.coefficients.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::fabs(fit.coefficients[j] - fx.oracle_coefs[j]) <= 1e-6);
    CHECK(std::fabs(medboot::logistic_sigma(fit, j) - fx.oracle_sigma[j]) <=
          1e-6);
  }

  // The fitted coefficients solve the score equation.
  const std::size_t n = fx.y.size();
  for (const auto* col : design) {
    double score = 0;
    for (std::size_t i = 0; i < n; ++i)
      score += (fx.y[i] - fit.fitted_probs[i]) * (*col)[i];
    CHECK(std::fabs(score / static_cast<double>(n)) <= 1e-8);
  }
}
