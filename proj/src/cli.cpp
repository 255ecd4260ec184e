#include "medboot/cli.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medboot/errors.hpp"
#include "medboot/pipeline.hpp"
#include "medboot/report.hpp"
#include "medboot/simstudy.hpp"
#include "medboot/tuning.hpp"

namespace medboot {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shared flag bundles

struct RoleFlags {
  std::string data;
  std::string exposure;
  std::vector<std::string> mediators;
  std::string outcome;
  std::vector<std::string> covariates;
};

void add_role_flags(CLI::App* cmd, RoleFlags& roles) {
  cmd->add_option("--data", roles.data, "CSV file with a header row")
      ->required();
  cmd->add_option("--exposure", roles.exposure, "exposure column name")
      ->required();
  cmd->add_option("--mediator", roles.mediators,
                  "mediator column name (repeat or comma-separate for several)")
      ->required()
      ->delimiter(',');
  cmd->add_option("--outcome", roles.outcome, "outcome column name")
      ->required();
  cmd->add_option("--covariate", roles.covariates,
                  "covariate column name (repeat or comma-separate)")
      ->delimiter(',');
}

Dataset load_dataset(const RoleFlags& roles) {
  ColumnRoleMap map;
  map.exposure = roles.exposure;
  map.mediators = roles.mediators;
  map.outcome = roles.outcome;
  map.covariates = roles.covariates;
  return parse_dataset_csv(roles.data, map);
}

ordered_json roles_json(const RoleFlags& roles) {
  ordered_json j;
  j["data"] = roles.data;
  j["exposure"] = roles.exposure;
  j["mediators"] = roles.mediators;
  j["outcome"] = roles.outcome;
  j["covariates"] = roles.covariates;
  return j;
}

struct AbFlags {
  int b = 500;
  double lambda = 2.0;
  std::uint64_t seed = 0;
  std::string scheme = "pairs";
  std::vector<double> omegas{0.05};
  int workers = 0;
};

void add_ab_flags(CLI::App* cmd, AbFlags& f) {
  cmd->add_option("-B,--b", f.b, "bootstrap replicate count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lambda", f.lambda,
                  "adaptive threshold scale (0 = classical bootstrap)")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "master RNG seed")->capture_default_str();
  cmd->add_option("--scheme", f.scheme, "resampling scheme")
      ->check(CLI::IsMember({"pairs", "projected"}))
      ->capture_default_str();
  cmd->add_option("--omega", f.omegas,
                  "decision significance levels (comma-separated)")
      ->delimiter(',');
  cmd->add_option("--workers", f.workers,
                  "bootstrap worker threads (0 = MEDBOOT_WORKERS or hardware)");
}

BootstrapScheme parse_scheme(const std::string& name) {
  return name == "projected" ? BootstrapScheme::projected
                             : BootstrapScheme::pairs;
}

AbConfig to_ab_config(const AbFlags& f) {
  AbConfig cfg;
  cfg.lambda = f.lambda;
  cfg.bootstrap.b = f.b;
  cfg.bootstrap.seed = f.seed;
  cfg.bootstrap.scheme = parse_scheme(f.scheme);
  cfg.bootstrap.workers = f.workers;
  cfg.omega_grid = f.omegas;
  return cfg;
}

// The config echo deliberately omits the worker count: it never changes any
// number in the output, and echoing it would break byte-equality between
// reruns that differ only in parallelism.
void echo_ab_flags(ordered_json& j, const AbFlags& f) {
  j["b"] = f.b;
  j["lambda"] = f.lambda;
  j["seed"] = f.seed;
  j["scheme"] = f.scheme;
  j["omega_grid"] = f.omegas;
}

struct OutputFlags {
  std::string out_path;
  std::string csv_path;
};

void add_output_flags(CLI::App* cmd, OutputFlags& f, const char* csv_help) {
  cmd->add_option("--out", f.out_path,
                  "write the report JSON (timing-free) to this file");
  cmd->add_option("--csv", f.csv_path, csv_help);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw_error(ErrorKind::input_error, "cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw_error(ErrorKind::input_error, "failed writing '" + path + "'");
  }
}

ordered_json shape_json(const PvalueShape& s) {
  ordered_json j;
  j["fraction_below_005"] = s.fraction_below_005;
  j["conservative"] = s.conservative;
  j["bent_up"] = s.bent_up;
  j["uniform"] = s.uniform;
  return j;
}

// ---------------------------------------------------------------------------
// run

struct RunFlags {
  RoleFlags roles;
  AbFlags ab;
  OutputFlags output;
  std::string method = "poc-ab";
  double s = 1.0;
  double s_star = 0.0;
  std::vector<double> at_x;
  std::optional<double> lambda_alpha;
  std::optional<double> lambda_beta;
};

ordered_json do_run(const RunFlags& f) {
  const Dataset data = load_dataset(f.roles);
  RunOptions options;
  options.method = f.method;
  options.ab = to_ab_config(f.ab);
  const bool glm = f.method.rfind("glm", 0) == 0;
  if (glm) {
    options.query.s = f.s;
    options.query.s_star = f.s_star;
    if (!f.at_x.empty()) {
      if (f.at_x.size() != f.roles.covariates.size()) {
        throw_error(ErrorKind::input_error,
                    "--at-x needs one value per --covariate (" +
                        std::to_string(f.roles.covariates.size()) + "), got " +
                        std::to_string(f.at_x.size()));
      }
      options.query.x.push_back(1.0);  // intercept slot
      options.query.x.insert(options.query.x.end(), f.at_x.begin(),
                             f.at_x.end());
    }
    options.lambda_alpha = f.lambda_alpha;
    options.lambda_beta = f.lambda_beta;
  }

  AnalysisReport report;
  report.command = "run";
  report.config["method"] = f.method;
  const ordered_json roles = roles_json(f.roles);
  for (const auto& [key, value] : roles.items()) {
    report.config[key] = value;
  }
  echo_ab_flags(report.config, f.ab);
  if (glm) {
    report.config["s"] = f.s;
    report.config["s_star"] = f.s_star;
    report.config["at_x"] = f.at_x;
    if (f.lambda_alpha) report.config["lambda_alpha"] = *f.lambda_alpha;
    if (f.lambda_beta) report.config["lambda_beta"] = *f.lambda_beta;
  }
  report.records.push_back(TestRecord{f.method, 0, run_single_test(data, options)});

  ordered_json j = report_json(report);
  if (!f.output.out_path.empty()) write_text_file(f.output.out_path, j.dump(2) + "\n");
  if (!f.output.csv_path.empty()) write_text_file(f.output.csv_path, report_csv(report));
  return j;
}

// ---------------------------------------------------------------------------
// screen

struct ScreenFlags {
  RoleFlags roles;
  AbFlags ab;
  OutputFlags output;
  std::string method = "poc-ab";
  double screen_fraction = 0.1;
  double fdr_q = 0.1;
  double split = 1.0;
};

ordered_json do_screen(const ScreenFlags& f) {
  const Dataset data = load_dataset(f.roles);
  ScreenOptions options;
  options.method = f.method;
  options.screen_fraction = f.screen_fraction;
  options.fdr_q = f.fdr_q;
  options.split_fraction = f.split;
  options.ab = to_ab_config(f.ab);
  AnalysisReport report = screen_then_joint(data, options);
  const ordered_json roles = roles_json(f.roles);
  for (const auto& [key, value] : roles.items()) {
    report.config[key] = value;
  }

  ordered_json j = report_json(report);
  if (!f.output.out_path.empty()) write_text_file(f.output.out_path, j.dump(2) + "\n");
  if (!f.output.csv_path.empty()) write_text_file(f.output.csv_path, report_csv(report));
  return j;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
  std::string config_path;
  OutputFlags output;
  int workers = -1;  // -1 = take the config's value
};

// Flat JSON study description. Field names follow the library's study and
// test configuration structs; anything unrecognized is an error so a typo
// cannot silently fall back to a default.
struct ParsedStudy {
  bool power = false;
  SimSpec spec;
  PowerSpec power_spec;
  ordered_json echo;  // resolved values, worker-free
};

template <typename T>
T get_key(const ordered_json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::input_error,
                "config key '" + key + "': " + e.what());
  }
}

ParsedStudy parse_study_config(const ordered_json& raw) {
  if (!raw.is_object()) {
    throw_error(ErrorKind::input_error, "config root must be a JSON object");
  }
  static const std::set<std::string> known{
      "study",      "scenario",     "n",           "reps",
      "seed",       "workers",      "methods",     "b",
      "lambda",     "omega_grid",   "scheme",      "alpha_s",
      "beta_m",     "alpha_vec",    "beta_vec",    "null_mode",
      "mixture_probs", "null_nonzero", "lambda_alpha", "lambda_beta",
      "setting",    "grid",         "product",     "omega"};
  for (const auto& [key, value] : raw.items()) {
    (void)value;
    if (!known.count(key)) {
      throw_error(ErrorKind::input_error, "unknown config key '" + key + "'");
    }
  }

  ParsedStudy out;
  const std::string study =
      raw.contains("study") ? get_key<std::string>(raw, "study") : "null";
  if (study == "power") {
    out.power = true;
  } else if (study != "null") {
    throw_error(ErrorKind::input_error,
                "config key 'study' must be \"null\" or \"power\", got \"" +
                    study + "\"");
  }
  if (!out.power) {
    for (const char* key : {"setting", "grid", "product", "omega"}) {
      if (raw.contains(key)) {
        throw_error(ErrorKind::input_error,
                    std::string("config key '") + key +
                        "' applies only to power studies");
      }
    }
  }

  if (!raw.contains("scenario")) {
    throw_error(ErrorKind::input_error, "config needs a 'scenario' key");
  }
  const std::string scenario_name = get_key<std::string>(raw, "scenario");
  SimScenario scenario;
  if (scenario_name == "linear") {
    scenario = SimScenario::linear;
  } else if (scenario_name == "multi") {
    scenario = SimScenario::multi;
  } else if (scenario_name == "glm1") {
    scenario = SimScenario::glm1;
  } else if (scenario_name == "glm2") {
    scenario = SimScenario::glm2;
  } else {
    throw_error(ErrorKind::input_error,
                "unknown scenario '" + scenario_name + "'");
  }
  SimSpec spec = make_sim_spec(scenario);

  if (raw.contains("n")) spec.n = get_key<std::size_t>(raw, "n");
  if (raw.contains("reps")) spec.reps = get_key<std::size_t>(raw, "reps");
  if (raw.contains("seed")) spec.seed = get_key<std::uint64_t>(raw, "seed");
  if (raw.contains("workers")) spec.workers = get_key<int>(raw, "workers");
  if (raw.contains("alpha_s")) spec.alpha_s = get_key<double>(raw, "alpha_s");
  if (raw.contains("beta_m")) spec.beta_m = get_key<double>(raw, "beta_m");
  if (raw.contains("alpha_vec")) {
    spec.alpha_vec = get_key<std::vector<double>>(raw, "alpha_vec");
  }
  if (raw.contains("beta_vec")) {
    spec.beta_vec = get_key<std::vector<double>>(raw, "beta_vec");
  }
  if (raw.contains("null_mode")) {
    const std::string mode = get_key<std::string>(raw, "null_mode");
    if (mode == "fixed") {
      spec.null_mode = NullMode::fixed;
    } else if (mode == "mixture") {
      spec.null_mode = NullMode::mixture;
    } else {
      throw_error(ErrorKind::input_error,
                  "config key 'null_mode' must be \"fixed\" or \"mixture\"");
    }
  }
  if (raw.contains("mixture_probs")) {
    const auto probs = get_key<std::vector<double>>(raw, "mixture_probs");
    if (probs.size() != 3) {
      throw_error(ErrorKind::input_error,
                  "config key 'mixture_probs' needs exactly 3 entries");
    }
    std::copy(probs.begin(), probs.end(), spec.mixture_probs.begin());
  }
  if (raw.contains("null_nonzero")) {
    spec.null_nonzero = get_key<double>(raw, "null_nonzero");
  }

  if (!raw.contains("methods")) {
    throw_error(ErrorKind::input_error, "config needs a 'methods' array");
  }
  const auto tags = get_key<std::vector<std::string>>(raw, "methods");
  if (tags.empty()) {
    throw_error(ErrorKind::input_error, "config 'methods' must be nonempty");
  }
  for (const std::string& tag : tags) {
    MethodSpec method = make_method(tag);
    if (raw.contains("b")) method.ab.bootstrap.b = get_key<int>(raw, "b");
    if (raw.contains("lambda")) method.ab.lambda = get_key<double>(raw, "lambda");
    if (raw.contains("omega_grid")) {
      method.ab.omega_grid = get_key<std::vector<double>>(raw, "omega_grid");
    }
    if (raw.contains("scheme")) {
      const std::string scheme = get_key<std::string>(raw, "scheme");
      if (scheme != "pairs" && scheme != "projected") {
        throw_error(ErrorKind::input_error,
                    "config key 'scheme' must be \"pairs\" or \"projected\"");
      }
      method.ab.bootstrap.scheme = parse_scheme(scheme);
    }
    if (raw.contains("lambda_alpha")) {
      method.lambda_alpha = get_key<double>(raw, "lambda_alpha");
    }
    if (raw.contains("lambda_beta")) {
      method.lambda_beta = get_key<double>(raw, "lambda_beta");
    }
    spec.methods.push_back(std::move(method));
  }

  out.spec = spec;
  if (out.power) {
    out.power_spec.base = spec;
    if (raw.contains("setting")) {
      const std::string setting = get_key<std::string>(raw, "setting");
      if (setting == "equal_signal") {
        out.power_spec.setting = PowerSetting::equal_signal;
      } else if (setting == "fixed_product") {
        out.power_spec.setting = PowerSetting::fixed_product;
      } else {
        throw_error(ErrorKind::input_error,
                    "config key 'setting' must be \"equal_signal\" or "
                    "\"fixed_product\"");
      }
    }
    if (!raw.contains("grid")) {
      throw_error(ErrorKind::input_error,
                  "power studies need a 'grid' array of signal sizes");
    }
    out.power_spec.grid = get_key<std::vector<double>>(raw, "grid");
    if (raw.contains("product")) {
      out.power_spec.product = get_key<double>(raw, "product");
    }
    if (raw.contains("omega")) {
      out.power_spec.omega = get_key<double>(raw, "omega");
    }
  }

  // Resolved echo (defaults filled in, workers omitted).
  ordered_json echo;
  echo["study"] = out.power ? "power" : "null";
  echo["scenario"] = scenario_name;
  echo["n"] = spec.n;
  echo["reps"] = spec.reps;
  echo["seed"] = spec.seed;
  ordered_json methods = ordered_json::array();
  for (const auto& m : spec.methods) methods.push_back(m.tag);
  echo["methods"] = std::move(methods);
  echo["b"] = spec.methods.front().ab.bootstrap.b;
  echo["lambda"] = spec.methods.front().ab.lambda;
  echo["omega_grid"] = spec.methods.front().ab.omega_grid;
  echo["scheme"] = scheme_name(spec.methods.front().ab.bootstrap.scheme);
  if (scenario == SimScenario::multi) {
    echo["alpha_vec"] = spec.alpha_vec;
    echo["beta_vec"] = spec.beta_vec;
  } else {
    echo["alpha_s"] = spec.alpha_s;
    echo["beta_m"] = spec.beta_m;
    echo["null_mode"] =
        spec.null_mode == NullMode::mixture ? "mixture" : "fixed";
    if (spec.null_mode == NullMode::mixture) {
      echo["mixture_probs"] = spec.mixture_probs;
      echo["null_nonzero"] = spec.null_nonzero;
    }
  }
  if (raw.contains("lambda_alpha")) {
    echo["lambda_alpha"] = get_key<double>(raw, "lambda_alpha");
  }
  if (raw.contains("lambda_beta")) {
    echo["lambda_beta"] = get_key<double>(raw, "lambda_beta");
  }
  if (out.power) {
    echo["setting"] = out.power_spec.setting == PowerSetting::fixed_product
                          ? "fixed_product"
                          : "equal_signal";
    echo["grid"] = out.power_spec.grid;
    if (out.power_spec.setting == PowerSetting::fixed_product) {
      echo["product"] = out.power_spec.product;
    }
    echo["omega"] = out.power_spec.omega;
  }
  out.echo = std::move(echo);
  return out;
}

ordered_json do_simulate(const SimulateFlags& f) {
  std::ifstream in(f.config_path);
  if (!in) {
    throw_error(ErrorKind::input_error,
                "cannot open config file '" + f.config_path + "'");
  }
  ordered_json raw;
  try {
    raw = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw_error(ErrorKind::input_error,
                "config file '" + f.config_path + "': " + e.what());
  }
  ParsedStudy study = parse_study_config(raw);
  if (f.workers >= 0) {
    study.spec.workers = f.workers;
    study.power_spec.base.workers = f.workers;
  }

  const SimulationReport report = study.power
                                      ? run_power_study(study.power_spec)
                                      : run_null_study(study.spec);

  ordered_json j;
  j["schema"] = kReportSchema;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = "simulate";
  j["config"] = study.echo;
  j["record_count"] = report.records.size();
  j["failures"] = report.failures;
  ordered_json summary = ordered_json::array();
  for (const auto& row : report.summary) {
    summary.push_back(ordered_json{{"method", row.method},
                                   {"omega", row.omega},
                                   {"rejection_rate", row.rejection_rate},
                                   {"ks_distance", row.ks_distance}});
  }
  j["summary"] = std::move(summary);
  ordered_json power = ordered_json::array();
  for (const auto& row : report.power) {
    power.push_back(ordered_json{{"signal", row.signal},
                                 {"method", row.method},
                                 {"power", row.power}});
  }
  j["power"] = std::move(power);

  if (!f.output.out_path.empty()) write_text_file(f.output.out_path, j.dump(2) + "\n");
  if (!f.output.csv_path.empty()) {
    write_text_file(f.output.csv_path + ".pvalues.csv", pvalues_csv(report));
    if (!report.summary.empty()) {
      write_text_file(f.output.csv_path + ".summary.csv", summary_csv(report));
    }
    if (!report.power.empty()) {
      write_text_file(f.output.csv_path + ".power.csv", power_csv(report));
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// tune / confirm

struct TuneFlags {
  RoleFlags roles;
  OutputFlags output;
  std::vector<double> grid{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  int b_outer = 500;
  int b_inner = 500;
  std::uint64_t seed = 0;
  int workers = 0;
};

ordered_json do_tune(const TuneFlags& f) {
  const Dataset data = load_dataset(f.roles);
  SelectLambdaConfig cfg;
  cfg.grid = f.grid;
  cfg.b_outer = f.b_outer;
  cfg.b_inner = f.b_inner;
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  const LambdaSelection sel = select_lambda(data, cfg);

  ordered_json j;
  j["schema"] = kReportSchema;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = "tune";
  ordered_json config = roles_json(f.roles);
  config["grid"] = f.grid;
  config["b_outer"] = f.b_outer;
  config["b_inner"] = f.b_inner;
  config["seed"] = f.seed;
  j["config"] = std::move(config);
  j["lambda"] = sel.lambda;
  j["degenerate_case"] = sel.degenerate_case;
  j["note"] = sel.note;
  j["alpha_shape"] = shape_json(sel.alpha_shape);
  j["beta_shape"] = shape_json(sel.beta_shape);
  ordered_json grid = ordered_json::array();
  for (const auto& d : sel.grid) {
    grid.push_back(ordered_json{{"lambda", d.lambda},
                                {"ks_distance", d.ks_distance},
                                {"passed", d.passed}});
  }
  j["grid"] = std::move(grid);
  if (!f.output.out_path.empty()) write_text_file(f.output.out_path, j.dump(2) + "\n");
  return j;
}

struct ConfirmFlags {
  RoleFlags roles;
  OutputFlags output;
  double lambda = 0.0;
  int b_outer = 500;
  int b_inner = 500;
  std::uint64_t seed = 0;
  int workers = 0;
};

ordered_json arm_json(const DoubleBootstrapResult& arm, const PvalueShape& shape) {
  ordered_json j;
  j["p_values"] = arm.p_values;
  j["missing"] = arm.missing;
  j["shape"] = shape_json(shape);
  return j;
}

ordered_json do_confirm(const ConfirmFlags& f) {
  const Dataset data = load_dataset(f.roles);
  ConfirmatoryConfig cfg;
  cfg.lambda = f.lambda;
  cfg.b_outer = f.b_outer;
  cfg.b_inner = f.b_inner;
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  const ConfirmatoryResult result = confirmatory_analysis(data, cfg);

  ordered_json j;
  j["schema"] = kReportSchema;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = "confirm";
  ordered_json config = roles_json(f.roles);
  config["lambda"] = f.lambda;
  config["b_outer"] = f.b_outer;
  config["b_inner"] = f.b_inner;
  config["seed"] = f.seed;
  j["config"] = std::move(config);
  j["pattern"] = confirmatory_pattern_name(result.pattern);
  j["observed"] = arm_json(result.observed, result.observed_shape);
  j["alpha_processed"] = arm_json(result.alpha_processed, result.alpha_shape);
  j["beta_processed"] = arm_json(result.beta_processed, result.beta_shape);
  if (!f.output.out_path.empty()) write_text_file(f.output.out_path, j.dump(2) + "\n");
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Adaptive-bootstrap mediation tests"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run one mediation test on a CSV dataset");
  add_role_flags(run_cmd, run_flags.roles);
  run_cmd
      ->add_option("--method", run_flags.method,
                   "test tag: poc-ab poc-b poc-sobel js-ab js-b js-maxp "
                   "joint-ab joint-b glm1-ab glm1-b glm2-ab glm2-b")
      ->required();
  add_ab_flags(run_cmd, run_flags.ab);
  run_cmd->add_option("--s", run_flags.s, "exposure level s (GLM methods)")
      ->capture_default_str();
  run_cmd
      ->add_option("--s-star", run_flags.s_star,
                   "reference exposure level s* (GLM methods)")
      ->capture_default_str();
  run_cmd->add_option(
      "--at-x", run_flags.at_x,
      "covariate values for the GLM effect query, one per --covariate "
      "(default: all zero)")
      ->delimiter(',');
  run_cmd->add_option("--lambda-alpha", run_flags.lambda_alpha,
                      "GLM-only threshold scale for the exposure coefficient");
  run_cmd->add_option("--lambda-beta", run_flags.lambda_beta,
                      "GLM-only threshold scale for the mediator coefficient");
  add_output_flags(run_cmd, run_flags.output,
                   "write the decision table as CSV to this file");

  ScreenFlags screen_flags;
  CLI::App* screen_cmd = app.add_subcommand(
      "screen", "two-step mediator screening with FDR control");
  add_role_flags(screen_cmd, screen_flags.roles);
  screen_cmd
      ->add_option("--method", screen_flags.method,
                   "per-mediator test: poc-ab or poc-b")
      ->check(CLI::IsMember({"poc-ab", "poc-b"}))
      ->capture_default_str();
  screen_cmd
      ->add_option("--screen-fraction", screen_flags.screen_fraction,
                   "fraction of mediators kept after the marginal step")
      ->capture_default_str();
  screen_cmd
      ->add_option("--fdr-q", screen_flags.fdr_q,
                   "Benjamini-Hochberg false-discovery target")
      ->capture_default_str();
  screen_cmd
      ->add_option("--split", screen_flags.split,
                   "row fraction for the screening step; the confirmation "
                   "step gets the rest (1 = no split)")
      ->capture_default_str();
  add_ab_flags(screen_cmd, screen_flags.ab);
  add_output_flags(screen_cmd, screen_flags.output,
                   "write the decision table as CSV to this file");

  SimulateFlags sim_flags;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte-Carlo calibration or power study from a JSON config");
  sim_cmd
      ->add_option("--config", sim_flags.config_path,
                   "flat JSON study description")
      ->required();
  sim_cmd->add_option("--workers", sim_flags.workers,
                      "override the config's replicate-level worker count");
  add_output_flags(sim_cmd, sim_flags.output,
                   "prefix for the long tables: writes <prefix>.pvalues.csv "
                   "plus <prefix>.summary.csv or <prefix>.power.csv");

  TuneFlags tune_flags;
  CLI::App* tune_cmd = app.add_subcommand(
      "tune", "double-bootstrap selection of the adaptive threshold scale");
  add_role_flags(tune_cmd, tune_flags.roles);
  tune_cmd->add_option("--grid", tune_flags.grid, "threshold scales to try")
      ->delimiter(',');
  tune_cmd->add_option("--b-outer", tune_flags.b_outer, "outer resamples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tune_cmd
      ->add_option("--b-inner", tune_flags.b_inner,
                   "bootstrap replicates inside each inner test")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tune_cmd->add_option("--seed", tune_flags.seed, "master RNG seed")
      ->capture_default_str();
  tune_cmd->add_option("--workers", tune_flags.workers,
                       "outer-layer worker threads (0 = auto)");
  add_output_flags(tune_cmd, tune_flags.output, "(unused)");

  ConfirmFlags confirm_flags;
  CLI::App* confirm_cmd = app.add_subcommand(
      "confirm", "double-bootstrap null-pattern diagnostics");
  add_role_flags(confirm_cmd, confirm_flags.roles);
  confirm_cmd
      ->add_option("--lambda", confirm_flags.lambda,
                   "threshold scale for the inner tests")
      ->capture_default_str();
  confirm_cmd
      ->add_option("--b-outer", confirm_flags.b_outer, "outer resamples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  confirm_cmd
      ->add_option("--b-inner", confirm_flags.b_inner,
                   "bootstrap replicates inside each inner test")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  confirm_cmd->add_option("--seed", confirm_flags.seed, "master RNG seed")
      ->capture_default_str();
  confirm_cmd->add_option("--workers", confirm_flags.workers,
                          "outer-layer worker threads (0 = auto)");
  add_output_flags(confirm_cmd, confirm_flags.output, "(unused)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    ordered_json j;
    if (run_cmd->parsed()) {
      j = do_run(run_flags);
    } else if (screen_cmd->parsed()) {
      j = do_screen(screen_flags);
    } else if (sim_cmd->parsed()) {
      j = do_simulate(sim_flags);
    } else if (tune_cmd->parsed()) {
      j = do_tune(tune_flags);
    } else {
      j = do_confirm(confirm_flags);
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    j["wall_time_s"] = elapsed.count();
    std::cout << j.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace medboot
