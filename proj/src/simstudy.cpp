#include "medboot/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <utility>

#include "medboot/errors.hpp"
#include "medboot/resampling.hpp"
#include "medboot/tuning.hpp"

namespace medboot {
namespace {

double logistic_cdf(double t) { return 1.0 / (1.0 + std::exp(-t)); }

SimScenario scenario_for_tag(const std::string& tag) {
  if (tag == "poc-ab" || tag == "poc-b" || tag == "poc-sobel" ||
      tag == "js-ab" || tag == "js-b" || tag == "js-maxp")
    return SimScenario::linear;
  if (tag == "joint-ab" || tag == "joint-b") return SimScenario::multi;
  if (tag == "glm1-ab" || tag == "glm1-b") return SimScenario::glm1;
  if (tag == "glm2-ab" || tag == "glm2-b") return SimScenario::glm2;
  throw_error(ErrorKind::input_error, "unknown method tag \"" + tag + "\"");
}

// Failures that depend on the particular random dataset. Anything else
// (configuration mistakes, malformed specs) would fail every replicate the
// same way and propagates instead of being counted as missing.
bool dataset_specific(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::singular_design:
    case ErrorKind::degenerate_response:
    case ErrorKind::non_convergence:
    case ErrorKind::separation_suspected:
    case ErrorKind::probability_boundary:
    case ErrorKind::degenerate_resampling:
      return true;
    default:
      return false;
  }
}

void validate_spec(const SimSpec& spec) {
  if (spec.reps < 1)
    throw_error(ErrorKind::input_error, "reps must be at least 1");
  if (spec.n < 1)
    throw_error(ErrorKind::input_error, "n must be at least 1");
  if (spec.methods.empty())
    throw_error(ErrorKind::input_error, "at least one method is required");
  for (const auto& m : spec.methods) {
    if (scenario_for_tag(m.tag) != spec.scenario)
      throw_error(ErrorKind::input_error,
                  "method \"" + m.tag + "\" does not apply to the " +
                      sim_scenario_name(spec.scenario) + " scenario");
  }
  if (spec.scenario == SimScenario::multi) {
    if (spec.alpha_vec.empty() ||
        spec.alpha_vec.size() != spec.beta_vec.size())
      throw_error(ErrorKind::input_error,
                  "the multi scenario needs coefficient vectors of equal "
                  "nonzero length");
    for (double v : spec.alpha_vec)
      if (!std::isfinite(v))
        throw_error(ErrorKind::input_error,
                    "coefficient vectors must be finite");
    for (double v : spec.beta_vec)
      if (!std::isfinite(v))
        throw_error(ErrorKind::input_error,
                    "coefficient vectors must be finite");
  } else if (!std::isfinite(spec.alpha_s) || !std::isfinite(spec.beta_m)) {
    throw_error(ErrorKind::input_error, "coefficients must be finite");
  }
  if (spec.null_mode == NullMode::mixture) {
    if (spec.scenario == SimScenario::multi)
      throw_error(ErrorKind::input_error,
                  "null-type randomization needs scalar coefficients; the "
                  "multi scenario uses fixed coefficient vectors");
    double total = 0.0;
    for (double p : spec.mixture_probs) {
      if (!(p >= 0.0))
        throw_error(ErrorKind::input_error,
                    "mixture probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw_error(ErrorKind::input_error,
                  "mixture probabilities must sum to 1");
    if (!std::isfinite(spec.null_nonzero))
      throw_error(ErrorKind::input_error,
                  "the nonzero null coefficient must be finite");
  }
}

Dataset gen_linear_impl(std::size_t n, const NuisanceParams& nu,
                        double alpha_s, double beta_m, rng::Engine& e) {
  std::vector<double> s(n), x1(n), x2(n), m(n), y(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = e.next_bernoulli(0.5);
  for (std::size_t i = 0; i < n; ++i) x1[i] = nu.x1_sd * e.next_normal();
  for (std::size_t i = 0; i < n; ++i) x2[i] = e.next_bernoulli(0.5);
  for (std::size_t i = 0; i < n; ++i)
    m[i] = alpha_s * s[i] + nu.alpha_intercept + nu.alpha_x1 * x1[i] +
           nu.alpha_x2 * x2[i] + nu.sigma_m * e.next_normal();
  for (std::size_t i = 0; i < n; ++i)
    y[i] = beta_m * m[i] + nu.beta_intercept + nu.beta_x1 * x1[i] +
           nu.beta_x2 * x2[i] + nu.tau_s * s[i] + nu.sigma_y * e.next_normal();
  return make_dataset(std::move(s), {std::move(m)}, std::move(y),
                      {std::move(x1), std::move(x2)});
}

Dataset gen_multi_impl(std::size_t n, const NuisanceParams& nu,
                       const std::vector<double>& alpha,
                       const std::vector<double>& beta, rng::Engine& e) {
  const std::size_t j = alpha.size();
  std::vector<double> s(n), x1(n), x2(n), y(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = e.next_bernoulli(0.5);
  for (std::size_t i = 0; i < n; ++i) x1[i] = nu.x1_sd * e.next_normal();
  for (std::size_t i = 0; i < n; ++i) x2[i] = e.next_bernoulli(0.5);
  std::vector<std::vector<double>> mediators(j);
  for (std::size_t k = 0; k < j; ++k) {
    mediators[k].resize(n);
    for (std::size_t i = 0; i < n; ++i)
      mediators[k][i] = alpha[k] * s[i] + nu.alpha_intercept +
                        nu.alpha_x1 * x1[i] + nu.alpha_x2 * x2[i] +
                        nu.sigma_m * e.next_normal();
  }
  for (std::size_t i = 0; i < n; ++i) {
    double lin = nu.beta_intercept + nu.beta_x1 * x1[i] + nu.beta_x2 * x2[i] +
                 nu.tau_s * s[i] + nu.sigma_y * e.next_normal();
    for (std::size_t k = 0; k < j; ++k) lin += beta[k] * mediators[k][i];
    y[i] = lin;
  }
  return make_dataset(std::move(s), std::move(mediators), std::move(y),
                      {std::move(x1), std::move(x2)});
}

Dataset gen_glm_impl(std::size_t n, const NuisanceParams& nu, bool binary_y,
                     double alpha_s, double beta_m, rng::Engine& e) {
  std::vector<double> s(n), x(n), m(n), y(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = e.next_bernoulli(0.5);
  for (std::size_t i = 0; i < n; ++i) x[i] = e.next_bernoulli(0.5);
  for (std::size_t i = 0; i < n; ++i)
    m[i] = e.next_bernoulli(logistic_cdf(alpha_s * s[i] + nu.alpha_intercept +
                                         nu.alpha_x1 * x[i]));
  for (std::size_t i = 0; i < n; ++i) {
    const double lin = beta_m * m[i] + nu.beta_intercept + nu.beta_x1 * x[i] +
                       nu.tau_s * s[i];
    y[i] = binary_y ? e.next_bernoulli(logistic_cdf(lin))
                    : lin + nu.sigma_y * e.next_normal();
  }
  return make_dataset(std::move(s), {std::move(m)}, std::move(y),
                      {std::move(x)});
}

Dataset generate_impl(const SimSpec& spec, double alpha_s, double beta_m,
                      const std::vector<double>& alpha,
                      const std::vector<double>& beta, rng::Engine& e) {
  switch (spec.scenario) {
    case SimScenario::linear:
      return gen_linear_impl(spec.n, spec.nuisance, alpha_s, beta_m, e);
    case SimScenario::multi:
      return gen_multi_impl(spec.n, spec.nuisance, alpha, beta, e);
    case SimScenario::glm1:
      return gen_glm_impl(spec.n, spec.nuisance, true, alpha_s, beta_m, e);
    case SimScenario::glm2:
      return gen_glm_impl(spec.n, spec.nuisance, false, alpha_s, beta_m, e);
  }
  throw_error(ErrorKind::input_error, "unknown scenario");
}

TestResult run_method(const SimSpec& spec, const MethodSpec& method,
                      const Dataset& data, std::uint64_t seed) {
  AbConfig ab = method.ab;
  ab.bootstrap.seed = seed;
  ab.bootstrap.workers = 1;  // parallelism lives at the replicate level
  const std::string& tag = method.tag;
  if (tag == "poc-ab") return adaptive_poc_test(data, ab);
  if (tag == "poc-b") return classical_poc_test(data, ab);
  if (tag == "poc-sobel")
    return sobel_test(poc_components(data), ab.omega_grid);
  if (tag == "js-ab") return adaptive_js_test(data, ab);
  if (tag == "js-b") return classical_js_test(data, ab);
  if (tag == "js-maxp") return maxp_test(poc_components(data), ab.omega_grid);
  if (tag == "joint-ab") return adaptive_joint_test(data, ab);
  if (tag == "joint-b") return classical_joint_test(data, ab);
  GlmConfig cfg;
  cfg.ab = std::move(ab);
  cfg.lambda_alpha = method.lambda_alpha;
  cfg.lambda_beta = method.lambda_beta;
  const GlmScenario scenario = (tag == "glm1-ab" || tag == "glm1-b")
                                   ? GlmScenario::logistic_outcome
                                   : GlmScenario::linear_outcome;
  if (tag == "glm1-ab" || tag == "glm2-ab")
    return adaptive_glm_test(data, scenario, spec.query, cfg);
  return classical_glm_test(data, scenario, spec.query, cfg);
}

// Replicate body shared by the null and power runners: pick coefficients,
// generate the dataset once, then run every method off its own substream.
// Slots for dataset-specific failures stay empty.
void run_replicate(const SimSpec& spec, std::uint64_t rep_seed,
                   double alpha_s, double beta_m,
                   const std::vector<double>& alpha_vec,
                   const std::vector<double>& beta_vec,
                   std::optional<TestResult>* out) {
  Dataset data = [&] {
    rng::Engine data_engine(rng::derive_seed(rep_seed, 1));
    return generate_impl(spec, alpha_s, beta_m, alpha_vec, beta_vec,
                         data_engine);
  }();
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    const std::uint64_t method_seed =
        rng::derive_seed(rep_seed, static_cast<std::uint64_t>(2 + m));
    try {
      out[m] = run_method(spec, spec.methods[m], data, method_seed);
    } catch (const Error& err) {
      if (!dataset_specific(err.kind())) throw;
    }
  }
}

// Runs `jobs` replicate bodies in parallel, slot-indexed so every worker
// count yields the same result.
template <typename Body>
void parallel_replicates(std::size_t jobs, int requested_workers,
                         const Body& body) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t k = next.fetch_add(1, std::memory_order_relaxed);
      if (k >= jobs) return;
      try {
        body(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(resolve_workers(requested_workers)), jobs));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// Collects slots into long records and per-method calibration summaries.
void assemble_records(const SimSpec& spec,
                      const std::vector<std::optional<TestResult>>& slots,
                      std::size_t reps, SimulationReport& report) {
  const std::size_t n_methods = spec.methods.size();
  report.records.reserve(slots.size());
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      const auto& slot = slots[r * n_methods + m];
      if (!slot) {
        ++report.failures;
        continue;
      }
      report.records.push_back(
          {r, spec.methods[m].tag, slot->p_value, slot->estimate});
    }
  }
}

void assemble_summary(const SimSpec& spec,
                      const std::vector<std::optional<TestResult>>& slots,
                      std::size_t reps, SimulationReport& report) {
  const std::size_t n_methods = spec.methods.size();
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::vector<double> ps;
    ps.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r)
      if (slots[r * n_methods + m]) ps.push_back(slots[r * n_methods + m]->p_value);
    if (ps.empty()) continue;  // every replicate failed: nothing to summarize
    const double ks = ks_uniform_distance(ps);
    for (double omega : spec.methods[m].ab.omega_grid) {
      std::size_t hits = 0;
      for (double p : ps)
        if (p <= omega) ++hits;
      report.summary.push_back({spec.methods[m].tag, omega,
                                static_cast<double>(hits) /
                                    static_cast<double>(ps.size()),
                                ks});
    }
  }
}

}  // namespace

const char* sim_scenario_name(SimScenario scenario) {
  switch (scenario) {
    case SimScenario::linear:
      return "linear";
    case SimScenario::multi:
      return "multi";
    case SimScenario::glm1:
      return "glm1";
    case SimScenario::glm2:
      return "glm2";
  }
  return "unknown";
}

NuisanceParams linear_sim_defaults() { return NuisanceParams{}; }

NuisanceParams multi_sim_defaults() {
  NuisanceParams nu;
  nu.x1_sd = 0.5;
  return nu;
}

NuisanceParams glm_sim_defaults() {
  NuisanceParams nu;
  nu.alpha_intercept = -1.0;
  nu.beta_intercept = -1.0;
  nu.alpha_x2 = 0.0;  // the binary-mediator designs carry one covariate
  nu.beta_x2 = 0.0;
  return nu;
}

SimSpec make_sim_spec(SimScenario scenario) {
  SimSpec spec;
  spec.scenario = scenario;
  switch (scenario) {
    case SimScenario::linear:
      spec.nuisance = linear_sim_defaults();
      break;
    case SimScenario::multi:
      spec.nuisance = multi_sim_defaults();
      break;
    case SimScenario::glm1:
      spec.nuisance = glm_sim_defaults();
      spec.query.s = 0.0;
      spec.query.s_star = 1.0;
      spec.query.x = {1.0, 0.0};  // intercept slot, then the covariate at 0
      break;
    case SimScenario::glm2:
      spec.nuisance = glm_sim_defaults();
      spec.query.s = 1.0;
      spec.query.s_star = 0.0;
      spec.query.x = {1.0, 0.0};
      break;
  }
  return spec;
}

MethodSpec make_method(std::string tag, AbConfig ab) {
  MethodSpec m;
  m.tag = std::move(tag);
  m.ab = std::move(ab);
  return m;
}

std::pair<std::vector<double>, std::vector<double>> multi_null_case(
    int case_id, std::size_t j) {
  if (j < 1)
    throw_error(ErrorKind::input_error, "at least one mediator is required");
  if (case_id < 1 || case_id > 7)
    throw_error(ErrorKind::input_error, "null case ids run from 1 to 7");
  if (case_id >= 4 && j % 2 != 0)
    throw_error(ErrorKind::input_error,
                "split-vector null cases need an even mediator count");
  const std::size_t h = j / 2;
  std::vector<double> alpha(j, 0.0), beta(j, 0.0);
  auto fill = [](std::vector<double>& v, std::size_t from, std::size_t to,
                 double value) {
    for (std::size_t k = from; k < to; ++k) v[k] = value;
  };
  switch (case_id) {
    case 1:
      break;
    case 2:
      fill(alpha, 0, j, 1.0);
      break;
    case 3:
      fill(beta, 0, j, 1.0);
      break;
    case 4:
      fill(alpha, 0, h, 1.0);
      fill(beta, h, j, 1.0);
      break;
    case 5:
      fill(alpha, h, j, 1.0);
      fill(beta, 0, h, 1.0);
      break;
    case 6:
      fill(alpha, 0, j, 1.0);
      fill(beta, 0, h, 1.0);
      fill(beta, h, j, -1.0);
      break;
    case 7:
      fill(alpha, 0, h, 1.0);
      fill(alpha, h, j, -1.0);
      fill(beta, 0, j, 1.0);
      break;
  }
  return {std::move(alpha), std::move(beta)};
}

Dataset gen_linear_sem(const SimSpec& spec, rng::Engine& engine) {
  if (spec.scenario != SimScenario::linear)
    throw_error(ErrorKind::input_error,
                "gen_linear_sem needs the linear scenario");
  return gen_linear_impl(spec.n, spec.nuisance, spec.alpha_s, spec.beta_m,
                         engine);
}

Dataset gen_multi_sem(const SimSpec& spec, rng::Engine& engine) {
  if (spec.scenario != SimScenario::multi)
    throw_error(ErrorKind::input_error,
                "gen_multi_sem needs the multi scenario");
  if (spec.alpha_vec.empty() || spec.alpha_vec.size() != spec.beta_vec.size())
    throw_error(ErrorKind::input_error,
                "the multi scenario needs coefficient vectors of equal "
                "nonzero length");
  return gen_multi_impl(spec.n, spec.nuisance, spec.alpha_vec, spec.beta_vec,
                        engine);
}

Dataset gen_glm_dataset(const SimSpec& spec, rng::Engine& engine) {
  if (spec.scenario != SimScenario::glm1 &&
      spec.scenario != SimScenario::glm2)
    throw_error(ErrorKind::input_error,
                "gen_glm_dataset needs a binary-mediator scenario");
  return gen_glm_impl(spec.n, spec.nuisance,
                      spec.scenario == SimScenario::glm1, spec.alpha_s,
                      spec.beta_m, engine);
}

Dataset generate_dataset(const SimSpec& spec, rng::Engine& engine) {
  if (spec.scenario == SimScenario::multi &&
      (spec.alpha_vec.empty() ||
       spec.alpha_vec.size() != spec.beta_vec.size()))
    throw_error(ErrorKind::input_error,
                "the multi scenario needs coefficient vectors of equal "
                "nonzero length");
  return generate_impl(spec, spec.alpha_s, spec.beta_m, spec.alpha_vec,
                       spec.beta_vec, engine);
}

SimulationReport run_null_study(const SimSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_spec(spec);
  const std::size_t n_methods = spec.methods.size();
  std::vector<std::optional<TestResult>> slots(spec.reps * n_methods);

  parallel_replicates(spec.reps, spec.workers, [&](std::size_t r) {
    const std::uint64_t rep_seed =
        rng::derive_seed(spec.seed, static_cast<std::uint64_t>(r));
    double alpha_s = spec.alpha_s;
    double beta_m = spec.beta_m;
    if (spec.null_mode == NullMode::mixture) {
      rng::Engine null_engine(rng::derive_seed(rep_seed, 0));
      const double u = null_engine.next_uniform();
      if (u < spec.mixture_probs[0]) {
        alpha_s = 0.0;
        beta_m = spec.null_nonzero;
      } else if (u < spec.mixture_probs[0] + spec.mixture_probs[1]) {
        alpha_s = spec.null_nonzero;
        beta_m = 0.0;
      } else {
        alpha_s = 0.0;
        beta_m = 0.0;
      }
    }
    run_replicate(spec, rep_seed, alpha_s, beta_m, spec.alpha_vec,
                  spec.beta_vec, &slots[r * n_methods]);
  });

  SimulationReport report;
  assemble_records(spec, slots, spec.reps, report);
  assemble_summary(spec, slots, spec.reps, report);
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

SimulationReport run_power_study(const PowerSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_spec(spec.base);
  validate_omegas({spec.omega});
  if (spec.grid.empty())
    throw_error(ErrorKind::input_error, "the signal grid must be nonempty");
  for (double g : spec.grid) {
    if (!std::isfinite(g))
      throw_error(ErrorKind::input_error, "grid values must be finite");
    if (spec.setting == PowerSetting::fixed_product && !(g > 0.0))
      throw_error(ErrorKind::input_error,
                  "coefficient ratios must be positive");
  }
  if (spec.setting == PowerSetting::fixed_product && !(spec.product > 0.0))
    throw_error(ErrorKind::input_error,
                "the fixed effect product must be positive");

  const SimSpec& base = spec.base;
  const std::size_t n_methods = base.methods.size();
  const std::size_t points = spec.grid.size();
  const std::size_t reps = base.reps;
  std::vector<std::optional<TestResult>> slots(points * reps * n_methods);

  // Coefficient split per grid point.
  std::vector<double> a_of(points), b_of(points);
  for (std::size_t g = 0; g < points; ++g) {
    if (spec.setting == PowerSetting::equal_signal) {
      a_of[g] = spec.grid[g];
      b_of[g] = spec.grid[g];
    } else {
      a_of[g] = std::sqrt(spec.product * spec.grid[g]);
      b_of[g] = std::sqrt(spec.product / spec.grid[g]);
    }
  }

  parallel_replicates(points * reps, base.workers, [&](std::size_t k) {
    const std::size_t g = k / reps;
    const std::size_t r = k % reps;
    const std::uint64_t point_seed =
        rng::derive_seed(base.seed, static_cast<std::uint64_t>(g));
    const std::uint64_t rep_seed =
        rng::derive_seed(point_seed, static_cast<std::uint64_t>(r));
    std::vector<double> alpha_vec, beta_vec;
    if (base.scenario == SimScenario::multi) {
      alpha_vec.assign(base.alpha_vec.size(), a_of[g]);
      beta_vec.assign(base.beta_vec.size(), b_of[g]);
    }
    run_replicate(base, rep_seed, a_of[g], b_of[g], alpha_vec, beta_vec,
                  &slots[k * n_methods]);
  });

  SimulationReport report;
  report.records.reserve(slots.size());
  for (std::size_t k = 0; k < points * reps; ++k) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      const auto& slot = slots[k * n_methods + m];
      if (!slot) {
        ++report.failures;
        continue;
      }
      report.records.push_back(
          {k, base.methods[m].tag, slot->p_value, slot->estimate});
    }
  }
  for (std::size_t g = 0; g < points; ++g) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      std::size_t hits = 0, valid = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& slot = slots[(g * reps + r) * n_methods + m];
        if (!slot) continue;
        ++valid;
        if (slot->p_value <= spec.omega) ++hits;
      }
      const double power =
          valid == 0 ? 0.0
                     : static_cast<double>(hits) / static_cast<double>(valid);
      report.power.push_back({spec.grid[g], base.methods[m].tag, power});
    }
  }
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string pvalues_csv(const SimulationReport& report) {
  std::string out = "rep,method,p_value,estimate\n";
  for (const auto& rec : report.records) {
    out += std::to_string(rec.rep);
    out += ',';
    out += rec.method;
    out += ',';
    out += format_double(rec.p_value);
    out += ',';
    out += format_double(rec.estimate);
    out += '\n';
  }
  return out;
}

std::string summary_csv(const SimulationReport& report) {
  std::string out = "method,omega,rejection_rate,ks_distance\n";
  for (const auto& row : report.summary) {
    out += row.method;
    out += ',';
    out += format_double(row.omega);
    out += ',';
    out += format_double(row.rejection_rate);
    out += ',';
    out += format_double(row.ks_distance);
    out += '\n';
  }
  return out;
}

std::string power_csv(const SimulationReport& report) {
  std::string out = "signal,method,power\n";
  for (const auto& row : report.power) {
    out += format_double(row.signal);
    out += ',';
    out += row.method;
    out += ',';
    out += format_double(row.power);
    out += '\n';
  }
  return out;
}

}  // namespace medboot
