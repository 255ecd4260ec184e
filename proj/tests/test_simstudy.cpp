#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "medboot/errors.hpp"
#include "medboot/glm_ab.hpp"
#include "medboot/linear_ab.hpp"
#include "medboot/rng.hpp"
#include "medboot/simstudy.hpp"
#include "medboot/tuning.hpp"

#include "test_support.hpp"

using namespace medboot;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.kind();
  }
  FAIL("expected an error");
  return ErrorKind::input_error;
}

bool same_records(const std::vector<SimRecord>& a,
                  const std::vector<SimRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rep != b[i].rep || a[i].method != b[i].method) return false;
    if (std::bit_cast<std::uint64_t>(a[i].p_value) !=
        std::bit_cast<std::uint64_t>(b[i].p_value))
      return false;
    if (std::bit_cast<std::uint64_t>(a[i].estimate) !=
        std::bit_cast<std::uint64_t>(b[i].estimate))
      return false;
  }
  return true;
}

AbConfig small_ab(int b) {
  AbConfig ab;
  ab.bootstrap.b = b;
  return ab;
}

std::vector<double> record_pvalues(const SimulationReport& report,
                                   const std::string& tag) {
  std::vector<double> out;
  for (const auto& rec : report.records)
    if (rec.method == tag) out.push_back(rec.p_value);
  return out;
}

double power_at(const SimulationReport& report, double signal,
                const std::string& tag) {
  for (const auto& row : report.power)
    if (row.signal == signal && row.method == tag) return row.power;
  FAIL("power row not found");
  return -1.0;
}

}  // namespace

TEST_CASE("scenario names and per-scenario defaults") {
  CHECK(std::string(sim_scenario_name(SimScenario::linear)) == "linear");
  CHECK(std::string(sim_scenario_name(SimScenario::multi)) == "multi");
  CHECK(std::string(sim_scenario_name(SimScenario::glm1)) == "glm1");
  CHECK(std::string(sim_scenario_name(SimScenario::glm2)) == "glm2");

  const auto lin = linear_sim_defaults();
  CHECK(lin.alpha_intercept == 1.0);
  CHECK(lin.sigma_m == 0.5);
  CHECK(lin.sigma_y == 0.5);
  CHECK(lin.tau_s == 1.0);
  CHECK(lin.x1_sd == 1.0);
  CHECK(multi_sim_defaults().x1_sd == 0.5);

  const auto glm = glm_sim_defaults();
  CHECK(glm.alpha_intercept == -1.0);
  CHECK(glm.beta_intercept == -1.0);
  CHECK(glm.alpha_x1 == 1.0);
  CHECK(glm.beta_x1 == 1.0);
  CHECK(glm.tau_s == 1.0);
  CHECK(glm.alpha_x2 == 0.0);

  const auto spec1 = make_sim_spec(SimScenario::glm1);
  CHECK(spec1.query.s == 0.0);
  CHECK(spec1.query.s_star == 1.0);
  REQUIRE(spec1.query.x.size() == 2);  // intercept slot + one covariate
  CHECK(spec1.query.x[0] == 1.0);
  CHECK(spec1.query.x[1] == 0.0);
  const auto spec2 = make_sim_spec(SimScenario::glm2);
  CHECK(spec2.query.s == 1.0);
  CHECK(spec2.query.s_star == 0.0);
  CHECK(make_sim_spec(SimScenario::multi).nuisance.x1_sd == 0.5);
}

TEST_CASE("noiseless generators are deterministic affine maps") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 64;
  spec.nuisance.sigma_m = 0.0;
  spec.nuisance.sigma_y = 0.0;
  spec.alpha_s = 0.0;
  spec.beta_m = 0.0;

  rng::Engine e(31337);
  const Dataset d = gen_linear_sem(spec, e);
  REQUIRE(d.n == 64);
  REQUIRE(d.j() == 1);
  REQUIRE(d.covariates.size() == 3);  // intercept + X1 + X2
  for (std::size_t i = 0; i < static_cast<std::size_t>(d.n); ++i) {
    const double x1 = d.covariates[1][i];
    const double x2 = d.covariates[2][i];
    CHECK(d.mediators[0][i] == doctest::Approx(1.0 + x1 + x2).epsilon(1e-12));
    CHECK(d.outcome[i] ==
          doctest::Approx(1.0 + x1 + x2 + d.exposure[i]).epsilon(1e-12));
    CHECK((d.exposure[i] == 0.0 || d.exposure[i] == 1.0));
    CHECK((x2 == 0.0 || x2 == 1.0));
  }
}

TEST_CASE("equal seeds reproduce every generator bit for bit") {
  SimSpec lin = make_sim_spec(SimScenario::linear);
  lin.n = 50;
  lin.alpha_s = 0.3;
  lin.beta_m = 0.7;

  SimSpec mul = make_sim_spec(SimScenario::multi);
  mul.n = 50;
  std::tie(mul.alpha_vec, mul.beta_vec) = multi_null_case(6, 4);

  SimSpec glm = make_sim_spec(SimScenario::glm1);
  glm.n = 50;
  glm.alpha_s = 0.5;
  glm.beta_m = 0.5;

  for (const SimSpec& spec : {lin, mul, glm}) {
    rng::Engine e1(99);
    rng::Engine e2(99);
    const Dataset a = generate_dataset(spec, e1);
    const Dataset b = generate_dataset(spec, e2);
    REQUIRE(a.n == b.n);
    REQUIRE(a.j() == b.j());
    CHECK(a.exposure == b.exposure);
    CHECK(a.outcome == b.outcome);
    for (std::size_t k = 0; k < a.j(); ++k)
      CHECK(a.mediators[k] == b.mediators[k]);
    for (std::size_t k = 0; k < a.covariates.size(); ++k)
      CHECK(a.covariates[k] == b.covariates[k]);
  }
}

TEST_CASE("generator scenario preconditions") {
  SimSpec lin = make_sim_spec(SimScenario::linear);
  rng::Engine e(1);
  CHECK(kind_of([&] { gen_multi_sem(lin, e); }) == ErrorKind::input_error);
  CHECK(kind_of([&] { gen_glm_dataset(lin, e); }) == ErrorKind::input_error);
  SimSpec mul = make_sim_spec(SimScenario::multi);
  mul.alpha_vec = {1.0, 0.0};
  mul.beta_vec = {1.0};
  CHECK(kind_of([&] { gen_multi_sem(mul, e); }) == ErrorKind::input_error);
  CHECK(kind_of([&] { gen_linear_sem(mul, e); }) == ErrorKind::input_error);
}

TEST_CASE("benchmark null coefficient vectors") {
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  for (int c = 1; c <= 7; ++c) {
    const auto [alpha, beta] = multi_null_case(c, 6);
    REQUIRE(alpha.size() == 6);
    REQUIRE(beta.size() == 6);
    CHECK(dot(alpha, beta) == 0.0);
  }
  const auto [a1, b1] = multi_null_case(1, 3);
  for (double v : a1) CHECK(v == 0.0);
  for (double v : b1) CHECK(v == 0.0);
  const auto [a6, b6] = multi_null_case(6, 4);
  CHECK(a6 == std::vector<double>{1.0, 1.0, 1.0, 1.0});
  CHECK(b6 == std::vector<double>{1.0, 1.0, -1.0, -1.0});

  CHECK(kind_of([] { multi_null_case(0, 4); }) == ErrorKind::input_error);
  CHECK(kind_of([] { multi_null_case(8, 4); }) == ErrorKind::input_error);
  CHECK(kind_of([] { multi_null_case(4, 5); }) == ErrorKind::input_error);
  CHECK(kind_of([] { multi_null_case(1, 0); }) == ErrorKind::input_error);
}

TEST_CASE("large-sample generator checks recover the design") {
  const std::size_t n = 100000;

  SimSpec lin = make_sim_spec(SimScenario::linear);
  lin.n = n;
  lin.alpha_s = 0.5;
  lin.beta_m = 0.25;
  rng::Engine e1(2024);
  const Dataset dlin = gen_linear_sem(lin, e1);
  const auto comps = poc_components(dlin);
  CHECK(std::abs(comps.alpha_hat - 0.5) < 0.02);
  CHECK(std::abs(comps.beta_hat - 0.25) < 0.02);

  SimSpec mul = make_sim_spec(SimScenario::multi);
  mul.n = n;
  std::tie(mul.alpha_vec, mul.beta_vec) = multi_null_case(2, 4);
  rng::Engine e2(2025);
  const Dataset dmul = gen_multi_sem(mul, e2);
  REQUIRE(dmul.j() == 4);
  double mean = 0.0;
  for (double v : dmul.covariates[1]) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : dmul.covariates[1]) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  CHECK(std::abs(var - 0.25) < 0.01);  // continuous covariate spread 0.5

  SimSpec g1 = make_sim_spec(SimScenario::glm1);
  g1.n = n;
  g1.alpha_s = 0.0;
  g1.beta_m = 0.5;
  rng::Engine e3(2026);
  const Dataset dg1 = gen_glm_dataset(g1, e3);
  double cnt[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < n; ++i)
    cnt[dg1.exposure[i] > 0.5][dg1.mediators[0][i] > 0.5] += 1.0;
  const double odds_ratio =
      (cnt[1][1] * cnt[0][0]) / (cnt[1][0] * cnt[0][1]);
  CHECK(std::abs(odds_ratio - 1.0) < 0.05);  // exposure off: M independent

  SimSpec g2 = make_sim_spec(SimScenario::glm2);
  g2.n = n;
  g2.alpha_s = 0.5;
  g2.beta_m = 0.0;
  rng::Engine e4(2027);
  const Dataset dg2 = gen_glm_dataset(g2, e4);
  const auto gcomps =
      glm_components(dg2, GlmScenario::linear_outcome, g2.query);
  CHECK(std::abs(gcomps.beta_m) < 0.02);
}

TEST_CASE("null study emits one record per replicate and method") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 120;
  spec.reps = 2;
  spec.seed = 7;
  spec.alpha_s = 0.0;
  spec.beta_m = 0.5;
  for (const char* tag :
       {"poc-ab", "poc-b", "poc-sobel", "js-ab", "js-b", "js-maxp"})
    spec.methods.push_back(make_method(tag, small_ab(99)));

  const auto report = run_null_study(spec);
  CHECK(report.failures == 0);
  REQUIRE(report.records.size() == 12);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t m = 0; m < 6; ++m) {
      const auto& rec = report.records[r * 6 + m];
      CHECK(rec.rep == r);
      CHECK(rec.method == spec.methods[m].tag);
      CHECK(rec.p_value > 0.0);
      CHECK(rec.p_value <= 1.0);
      CHECK(std::isfinite(rec.estimate));
    }
  }
  REQUIRE(report.summary.size() == 6);  // one omega level per method
  for (const auto& row : report.summary) {
    CHECK(row.omega == 0.05);
    CHECK(row.rejection_rate >= 0.0);
    CHECK(row.rejection_rate <= 1.0);
    CHECK(row.ks_distance > 0.0);
    CHECK(row.ks_distance <= 1.0);
  }
  CHECK(report.total_seconds >= 0.0);
}

TEST_CASE("study spec validation") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 60;
  spec.reps = 1;
  CHECK(kind_of([&] { run_null_study(spec); }) == ErrorKind::input_error);

  spec.methods = {make_method("poc-sobel")};
  spec.reps = 0;
  CHECK(kind_of([&] { run_null_study(spec); }) == ErrorKind::input_error);
  spec.reps = 1;

  SimSpec bad = spec;
  bad.methods = {make_method("not-a-method")};
  CHECK(kind_of([&] { run_null_study(bad); }) == ErrorKind::input_error);
  bad.methods = {make_method("joint-ab", small_ab(19))};
  CHECK(kind_of([&] { run_null_study(bad); }) == ErrorKind::input_error);

  SimSpec mix = spec;
  mix.null_mode = NullMode::mixture;
  mix.mixture_probs = {0.5, 0.6, 0.2};
  CHECK(kind_of([&] { run_null_study(mix); }) == ErrorKind::input_error);
  mix.mixture_probs = {-0.5, 0.5, 1.0};
  CHECK(kind_of([&] { run_null_study(mix); }) == ErrorKind::input_error);

  SimSpec mul = make_sim_spec(SimScenario::multi);
  mul.n = 60;
  mul.reps = 1;
  mul.methods = {make_method("joint-ab", small_ab(19))};
  CHECK(kind_of([&] { run_null_study(mul); }) == ErrorKind::input_error);
  std::tie(mul.alpha_vec, mul.beta_vec) = multi_null_case(1, 2);
  mul.null_mode = NullMode::mixture;
  CHECK(kind_of([&] { run_null_study(mul); }) == ErrorKind::input_error);
  mul.null_mode = NullMode::fixed;
  run_null_study(mul);  // now valid
}

TEST_CASE("degenerate mixtures reduce to the matching fixed null") {
  SimSpec fixed = make_sim_spec(SimScenario::linear);
  fixed.n = 100;
  fixed.reps = 8;
  fixed.seed = 4321;
  fixed.methods = {make_method("poc-sobel")};
  fixed.alpha_s = 0.0;
  fixed.beta_m = 0.0;

  SimSpec mix = fixed;
  mix.null_mode = NullMode::mixture;
  mix.mixture_probs = {0.0, 0.0, 1.0};
  CHECK(same_records(run_null_study(fixed).records,
                     run_null_study(mix).records));

  fixed.alpha_s = 0.0;
  fixed.beta_m = 0.5;
  mix.mixture_probs = {1.0, 0.0, 0.0};
  CHECK(same_records(run_null_study(fixed).records,
                     run_null_study(mix).records));

  fixed.alpha_s = 0.5;
  fixed.beta_m = 0.0;
  mix.mixture_probs = {0.0, 1.0, 0.0};
  CHECK(same_records(run_null_study(fixed).records,
                     run_null_study(mix).records));
}

TEST_CASE("worker count never changes a report") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 80;
  spec.reps = 10;
  spec.seed = 555;
  spec.alpha_s = 0.0;
  spec.beta_m = 0.0;
  spec.null_mode = NullMode::mixture;
  spec.methods = {make_method("poc-ab", small_ab(59)),
                  make_method("poc-sobel")};

  spec.workers = 1;
  const auto serial = run_null_study(spec);
  spec.workers = 3;
  const auto threaded = run_null_study(spec);
  CHECK(same_records(serial.records, threaded.records));
  CHECK(pvalues_csv(serial) == pvalues_csv(threaded));
  CHECK(summary_csv(serial) == summary_csv(threaded));
}

TEST_CASE("replicate substream layout is exactly as documented") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 90;
  spec.reps = 3;
  spec.seed = 31415;
  spec.alpha_s = 0.2;
  spec.beta_m = 0.4;
  spec.methods = {make_method("poc-sobel"), make_method("poc-ab", small_ab(79))};

  const auto report = run_null_study(spec);
  REQUIRE(report.records.size() == 6);

  // Rebuild replicate 1 by hand: dataset from derive(rep_seed, 1), the
  // second method's bootstrap seed from derive(rep_seed, 3).
  const std::uint64_t rep_seed = rng::derive_seed(spec.seed, 1);
  rng::Engine data_engine(rng::derive_seed(rep_seed, 1));
  const Dataset data = gen_linear_sem(spec, data_engine);

  AbConfig ab = small_ab(79);
  ab.bootstrap.seed = rng::derive_seed(rep_seed, 3);
  ab.bootstrap.workers = 1;
  const auto direct = adaptive_poc_test(data, ab);
  const auto& rec = report.records[1 * 2 + 1];
  CHECK(rec.method == "poc-ab");
  CHECK(std::bit_cast<std::uint64_t>(rec.p_value) ==
        std::bit_cast<std::uint64_t>(direct.p_value));
  CHECK(std::bit_cast<std::uint64_t>(rec.estimate) ==
        std::bit_cast<std::uint64_t>(direct.estimate));

  const auto sobel = sobel_test(poc_components(data));
  CHECK(std::bit_cast<std::uint64_t>(report.records[1 * 2 + 0].p_value) ==
        std::bit_cast<std::uint64_t>(sobel.p_value));
}

TEST_CASE("plug-in tests stay calibrated where expected at desk scale") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 200;
  spec.reps = 300;
  spec.seed = 8080;
  spec.methods = {make_method("poc-sobel")};

  // Exposure path off, outcome path strong: the delta-method test is
  // asymptotically exact and its p-values should look uniform.
  spec.alpha_s = 0.0;
  spec.beta_m = 0.5;
  const auto h01 = run_null_study(spec);
  CHECK(h01.failures == 0);
  CHECK(ks_uniform_pass(record_pvalues(h01, "poc-sobel"), 0.01));

  // Both paths off: the same test collapses far below nominal level.
  spec.beta_m = 0.0;
  const auto h03 = run_null_study(spec);
  REQUIRE(h03.summary.size() == 1);
  CHECK(h03.summary[0].omega == 0.05);
  CHECK(h03.summary[0].rejection_rate < 0.02);
}

TEST_CASE("equal-signal power sweep ranks the bootstrap tests") {
  PowerSpec power;
  power.base = make_sim_spec(SimScenario::linear);
  power.base.n = 200;
  power.base.reps = 60;
  power.base.seed = 1212;
  power.base.methods = {make_method("poc-ab", small_ab(199)),
                        make_method("poc-b", small_ab(199)),
                        make_method("poc-sobel")};
  power.setting = PowerSetting::equal_signal;
  power.grid = {0.0, 0.2};

  const auto report = run_power_study(power);
  CHECK(report.failures == 0);
  CHECK(report.records.size() == 2 * 60 * 3);
  CHECK(report.summary.empty());
  REQUIRE(report.power.size() == 6);
  CHECK(report.power[0].signal == 0.0);
  CHECK(report.power[0].method == "poc-ab");
  CHECK(report.power[5].signal == 0.2);
  CHECK(report.power[5].method == "poc-sobel");

  // 60 replicates leave binomial noise around the adaptive test's ~0.04
  // large-sample null rate; the acceptance suite pins the 1000-rep window.
  CHECK(power_at(report, 0.0, "poc-ab") <= 0.18);
  CHECK(power_at(report, 0.0, "poc-sobel") <= 0.12);
  const double ab = power_at(report, 0.2, "poc-ab");
  const double classical = power_at(report, 0.2, "poc-b");
  CHECK(ab >= 0.5);
  // The adaptive test dominates the classical one decisively here; the
  // classical centered-interval test pays a skewness penalty under the
  // alternative that the delta-method test does not.
  CHECK(ab >= classical + 0.1);
}

TEST_CASE("fixed-product power sweep splits the product by ratio") {
  PowerSpec power;
  power.base = make_sim_spec(SimScenario::linear);
  power.base.n = 150;
  power.base.reps = 30;
  power.base.seed = 21;
  power.base.methods = {make_method("poc-ab", small_ab(99))};
  power.setting = PowerSetting::fixed_product;
  power.product = 0.04;
  power.grid = {0.25, 1.0, 4.0};

  const auto report = run_power_study(power);
  REQUIRE(report.power.size() == 3);
  for (std::size_t g = 0; g < 3; ++g) {
    CHECK(report.power[g].signal == power.grid[g]);
    CHECK(report.power[g].power >= 0.0);
    CHECK(report.power[g].power <= 1.0);
  }

  // The documented layout: point g = 2, replicate 0 uses coefficients
  // sqrt(0.04 * 4) = 0.4 and sqrt(0.04 / 4) = 0.1.
  const std::uint64_t rep_seed =
      rng::derive_seed(rng::derive_seed(power.base.seed, 2), 0);
  SimSpec gen = power.base;
  gen.alpha_s = 0.4;
  gen.beta_m = 0.1;
  rng::Engine data_engine(rng::derive_seed(rep_seed, 1));
  const Dataset data = gen_linear_sem(gen, data_engine);
  AbConfig ab = small_ab(99);
  ab.bootstrap.seed = rng::derive_seed(rep_seed, 2);
  ab.bootstrap.workers = 1;
  const auto direct = adaptive_poc_test(data, ab);
  const auto& rec = report.records[(2 * 30 + 0) * 1];
  CHECK(rec.rep == 60);
  CHECK(std::bit_cast<std::uint64_t>(rec.p_value) ==
        std::bit_cast<std::uint64_t>(direct.p_value));

  power.grid = {};
  CHECK(kind_of([&] { run_power_study(power); }) == ErrorKind::input_error);
  power.grid = {-1.0};
  CHECK(kind_of([&] { run_power_study(power); }) == ErrorKind::input_error);
  power.grid = {1.0};
  power.product = 0.0;
  CHECK(kind_of([&] { run_power_study(power); }) == ErrorKind::input_error);
  power.product = 0.04;
  power.omega = 0.0;
  CHECK(kind_of([&] { run_power_study(power); }) == ErrorKind::input_error);
}

TEST_CASE("binary-mediator studies run both scenarios") {
  SimSpec spec = make_sim_spec(SimScenario::glm2);
  spec.n = 150;
  spec.reps = 4;
  spec.seed = 99;
  spec.alpha_s = 0.4;
  spec.beta_m = 0.0;
  spec.methods = {make_method("glm2-ab", small_ab(59))};
  const auto report = run_null_study(spec);
  CHECK(report.failures == 0);
  REQUIRE(report.records.size() == 4);
  for (const auto& rec : report.records) {
    CHECK(rec.method == "glm2-ab");
    CHECK(rec.p_value > 0.0);
    CHECK(rec.p_value <= 1.0);
  }

  SimSpec spec1 = make_sim_spec(SimScenario::glm1);
  spec1.n = 150;
  spec1.reps = 2;
  spec1.seed = 100;
  spec1.alpha_s = 0.5;
  spec1.beta_m = 0.5;
  spec1.methods = {make_method("glm1-ab", small_ab(39))};
  CHECK(run_null_study(spec1).records.size() == 2);
}

TEST_CASE("per-method threshold overrides reach the binary-mediator tests") {
  SimSpec spec = make_sim_spec(SimScenario::glm2);
  spec.n = 150;
  spec.reps = 3;
  spec.seed = 2222;
  spec.alpha_s = 0.3;
  spec.beta_m = 0.3;

  MethodSpec adaptive = make_method("glm2-ab", small_ab(49));
  adaptive.lambda_alpha = 0.0;  // zero thresholds force the classical branch
  adaptive.lambda_beta = 0.0;
  spec.methods = {adaptive};
  const auto forced = run_null_study(spec);

  spec.methods = {make_method("glm2-b", small_ab(49))};
  const auto classical = run_null_study(spec);

  REQUIRE(forced.records.size() == classical.records.size());
  for (std::size_t i = 0; i < forced.records.size(); ++i)
    CHECK(std::bit_cast<std::uint64_t>(forced.records[i].p_value) ==
          std::bit_cast<std::uint64_t>(classical.records[i].p_value));
}

TEST_CASE("round-trip double formatting and exact table bytes") {
  for (double v : {1.0 / 3.0, 1e-17, 6.02214076e23, -0.0, 0.05, 12345.678,
                   5.733031437583866e-07}) {
    const std::string s = format_double(v);
    CHECK(std::bit_cast<std::uint64_t>(std::strtod(s.c_str(), nullptr)) ==
          std::bit_cast<std::uint64_t>(v));
  }

  SimulationReport report;
  report.records = {{0, "poc-ab", 0.5, 1.25}, {1, "js-maxp", 0.03125, -2.0}};
  report.summary = {{"poc-ab", 0.05, 0.25, 0.125}};
  report.power = {{0.2, "poc-ab", 0.75}};
  CHECK(pvalues_csv(report) ==
        "rep,method,p_value,estimate\n"
        "0,poc-ab,0.5,1.25\n"
        "1,js-maxp,0.03125,-2\n");
  CHECK(summary_csv(report) ==
        "method,omega,rejection_rate,ks_distance\n"
        "poc-ab,0.05,0.25,0.125\n");
  CHECK(power_csv(report) ==
        "signal,method,power\n"
        "0.2,poc-ab,0.75\n");
}

TEST_CASE("identical specs give identical tables") {
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 100;
  spec.reps = 6;
  spec.seed = 777;
  spec.null_mode = NullMode::mixture;
  spec.methods = {make_method("js-ab", small_ab(79)),
                  make_method("js-maxp")};
  const auto a = run_null_study(spec);
  const auto b = run_null_study(spec);
  CHECK(pvalues_csv(a) == pvalues_csv(b));
  CHECK(summary_csv(a) == summary_csv(b));
}
