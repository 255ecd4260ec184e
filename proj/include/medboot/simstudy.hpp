#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medboot/dataset.hpp"
#include "medboot/glm_ab.hpp"
#include "medboot/linear_ab.hpp"
#include "medboot/rng.hpp"

// Synthetic-data generators and Monte-Carlo experiment runners. The
// generators reproduce the benchmark designs used to calibrate the adaptive
// bootstrap tests; the runners sweep them over replications and emit
// plot-ready tables (long-format p-values, per-method rejection summaries,
// and power-versus-signal curves).
//
// Reproducibility contract: a run is a pure function of its spec (seed
// included). Replicate r derives rep_seed = derive(master_seed, r) and
// consumes three kinds of substreams so that no draw order ever shifts:
//   derive(rep_seed, 0)      null-type selection (mixture mode only)
//   derive(rep_seed, 1)      dataset generation
//   derive(rep_seed, 2 + m)  bootstrap seed for the m-th method
// All methods within a replicate share the one dataset, which removes
// between-method Monte-Carlo noise from comparisons. Power studies give
// grid point g its own point_seed = derive(master_seed, g) and then apply
// the same per-replicate layout beneath it. Replicates run in parallel;
// results are slot-indexed, so every worker count produces identical
// reports. Uniform and normal variates come from the engine's documented
// inverse-CDF transforms: index streams are bit-stable everywhere, float
// streams are bit-stable wherever libm matches.

namespace medboot {

enum class SimScenario {
  linear,  // one mediator, linear mediator and outcome models
  multi,   // J mediators, linear models, joint product test
  glm1,    // binary mediator and binary outcome (log odds-ratio NIE)
  glm2,    // binary mediator, linear outcome (mean-difference NIE)
};

const char* sim_scenario_name(SimScenario scenario);

// Nuisance side of the generating models. The mediation-target coefficients
// (exposure -> mediator, mediator -> outcome) live in the spec; everything
// here is held fixed across a study.
struct NuisanceParams {
  double alpha_intercept = 1.0;  // mediator-model intercept
  double alpha_x1 = 1.0;         // mediator-model continuous-covariate slope
  double alpha_x2 = 1.0;         // mediator-model binary-covariate slope
  double beta_intercept = 1.0;   // outcome-model intercept
  double beta_x1 = 1.0;
  double beta_x2 = 1.0;
  double tau_s = 1.0;            // direct exposure -> outcome effect
  double sigma_m = 0.5;          // mediator noise scale (linear scenarios)
  double sigma_y = 0.5;          // outcome noise scale (linear outcome only)
  double x1_sd = 1.0;            // spread of the continuous covariate
};

// Benchmark defaults. The single-mediator linear design uses a unit-spread
// continuous covariate; the multi-mediator variant shrinks it to 0.5. The
// binary-mediator designs drop to one Bernoulli covariate and center the
// link at -1 so that event rates stay off the boundary.
NuisanceParams linear_sim_defaults();
NuisanceParams multi_sim_defaults();
NuisanceParams glm_sim_defaults();

// One testing method inside a study: a registered tag plus the bootstrap
// configuration it runs with. The runner overwrites ab.bootstrap.seed per
// (replicate, method) and forces ab.bootstrap.workers = 1 — parallelism
// belongs to the replicate level. Valid tags per scenario:
//   linear: poc-ab poc-b poc-sobel js-ab js-b js-maxp
//   multi:  joint-ab joint-b
//   glm1:   glm1-ab glm1-b        glm2: glm2-ab glm2-b
// The lambda overrides feed GlmConfig for the glm tags and are ignored by
// the linear ones.
struct MethodSpec {
  std::string tag;
  AbConfig ab;
  std::optional<double> lambda_alpha;
  std::optional<double> lambda_beta;
};

enum class NullMode {
  fixed,    // every replicate uses the spec's coefficients as written
  mixture,  // each replicate draws its null type from mixture_probs
};

struct SimSpec {
  SimScenario scenario = SimScenario::linear;
  std::size_t n = 200;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  int workers = 0;  // replicate-level parallelism; 0 = resolve from env/hw

  // Target coefficients. Scalar pair for linear/glm scenarios; the vectors
  // (equal length J >= 1) drive the multi scenario and must be set there.
  double alpha_s = 0.0;
  double beta_m = 0.0;
  std::vector<double> alpha_vec;
  std::vector<double> beta_vec;

  NuisanceParams nuisance;  // set per scenario by make_sim_spec

  // Null-type randomization (scalar scenarios only). Each replicate draws
  // one of three composite-null corners with these probabilities: exposure
  // path off (0, v), outcome path off (v, 0), both off (0, 0), where
  // v = null_nonzero. Probabilities must be nonnegative and sum to 1.
  NullMode null_mode = NullMode::fixed;
  std::array<double, 3> mixture_probs{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double null_nonzero = 0.5;

  std::vector<MethodSpec> methods;

  // Contrast at which the binary-mediator NIE is evaluated (glm scenarios).
  NieQuery query;
};

// Spec with scenario-appropriate nuisance defaults and, for the glm
// scenarios, the benchmark NIE contrast (glm1: s 0 -> s* 1 at x = 0;
// glm2: s 1 -> s* 0 at x = 0).
SimSpec make_sim_spec(SimScenario scenario);

MethodSpec make_method(std::string tag, AbConfig ab = {});

// The seven benchmark coefficient-vector pairs (alpha, beta) for the multi
// scenario's composite nulls, indexed 1..7:
//   1 (0,0)  2 (1,0)  3 (0,1)  4 (1 then 0, 0 then 1)  5 mirror of 4
//   6 alpha all ones, beta +1 first half / -1 second half  7 mirror of 6
// Cases 4-7 need even J. Every pair satisfies alpha'beta = 0 exactly.
std::pair<std::vector<double>, std::vector<double>> multi_null_case(
    int case_id, std::size_t j);

// --------------------------------------------------------------------------
// Generators. Each consumes a caller-owned engine and draws column by
// column in a documented order (exposure, covariates, mediators, outcome),
// so equal seeds give equal datasets. All emit complete finite data.

// S ~ Bernoulli(0.5); X1 ~ N(0, x1_sd^2); X2 ~ Bernoulli(0.5);
// M = alpha_s S + a_I + a_1 X1 + a_2 X2 + sigma_m eps;
// Y = beta_m M + b_I + b_1 X1 + b_2 X2 + tau_s S + sigma_y eps.
Dataset gen_linear_sem(const SimSpec& spec, rng::Engine& engine);

// The J-mediator extension: each M_j gets its own coefficient pair
// (alpha_vec[j], beta_vec[j]) and fresh noise, one shared outcome equation.
Dataset gen_multi_sem(const SimSpec& spec, rng::Engine& engine);

// Binary mediator: S, X ~ Bernoulli(0.5) and
// M ~ Bernoulli(g(alpha_s S + a_I + a_1 X)) with g the logistic CDF.
// Scenario glm1 draws Y ~ Bernoulli(g(beta_m M + b_I + b_1 X + tau_s S));
// glm2 sets Y = beta_m M + b_I + b_1 X + tau_s S + sigma_y eps.
Dataset gen_glm_dataset(const SimSpec& spec, rng::Engine& engine);

// Dispatch on spec.scenario.
Dataset generate_dataset(const SimSpec& spec, rng::Engine& engine);

// --------------------------------------------------------------------------
// Experiment runners

struct SimRecord {
  std::size_t rep = 0;
  std::string method;
  double p_value = 1.0;
  double estimate = 0.0;
};

struct SummaryRow {
  std::string method;
  double omega = 0.0;
  double rejection_rate = 0.0;  // fraction of records with p <= omega
  double ks_distance = 0.0;     // one-sample KS distance of p to U(0,1)
};

struct PowerRow {
  double signal = 0.0;  // grid value: coefficient size or alpha/beta ratio
  std::string method;
  double power = 0.0;
};

struct SimulationReport {
  std::vector<SimRecord> records;  // replicate-major, then method order
  std::vector<SummaryRow> summary;
  std::vector<PowerRow> power;   // power studies only
  std::size_t failures = 0;      // (rep, method) evaluations that threw
  double total_seconds = 0.0;    // wall time; never written to the tables
};

// Runs spec.reps replicates of generate -> test for every method and
// summarizes rejection rates over each method's omega grid plus the KS
// distance of its p-sample to uniform. A numerical failure in one method
// drops that single record (counted in failures); with zero failures the
// report holds exactly reps * |methods| records. Throws InputError for an
// invalid spec (no methods, unknown or scenario-incompatible tag, bad
// mixture probabilities, mixture mode with the multi scenario, missing or
// mismatched coefficient vectors).
SimulationReport run_null_study(const SimSpec& spec);

enum class PowerSetting {
  equal_signal,   // grid entries g set alpha_s = beta_m = g
  fixed_product,  // grid entries r split product: alpha = sqrt(product r),
                  // beta = sqrt(product / r); requires product > 0, r > 0
};

struct PowerSpec {
  SimSpec base;  // scenario, n, nuisance, methods, seed, workers; reps per
                 // grid point (conventional default: 500)
  PowerSetting setting = PowerSetting::equal_signal;
  std::vector<double> grid;  // signal sizes or ratios; must be nonempty
  double product = 0.04;     // fixed_product only
  double omega = 0.05;       // rejection level the power column reports
};

// One fixed-null-style sweep per grid point. The power table gets one row
// per (grid value, method); the long records are kept with replicate ids
// flattened as point_index * reps + rep. The multi scenario scales its
// all-ones coefficient vectors by the grid's alpha/beta split.
SimulationReport run_power_study(const PowerSpec& spec);

// --------------------------------------------------------------------------
// Plot-ready CSV emission. Headers exactly as documented; doubles printed
// via the shortest round-trip form, so equal reports give equal bytes.

std::string format_double(double value);

// "rep,method,p_value,estimate"
std::string pvalues_csv(const SimulationReport& report);
// "method,omega,rejection_rate,ks_distance"
std::string summary_csv(const SimulationReport& report);
// "signal,method,power"
std::string power_csv(const SimulationReport& report);

}  // namespace medboot
