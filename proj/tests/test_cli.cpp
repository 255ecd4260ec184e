#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "medboot/dataset.hpp"
#include "medboot/glm_ab.hpp"
#include "medboot/linear_ab.hpp"
#include "medboot/pipeline.hpp"
#include "medboot/report.hpp"
#include "medboot/rng.hpp"
#include "medboot/simstudy.hpp"

// End-to-end tests of the installed binary. The binary path arrives in
// MEDBOOT_CLI_PATH (set by the build); every invocation is a real
// subprocess with captured stdout/stderr and exit code.

using namespace medboot;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("MEDBOOT_CLI_PATH");
  REQUIRE_MESSAGE(p != nullptr,
                  "MEDBOOT_CLI_PATH must point at the medboot binary");
  return p;
}

const std::string& scratch() {
  static const std::string dir = [] {
    const auto path = std::filesystem::current_path() / "cli_scratch";
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
    return path.string();
  }();
  return dir;
}

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

// `env_prefix` is prepended verbatim (e.g. "MEDBOOT_WORKERS=3 ").
CmdResult run_cli_process(const std::string& args,
                          const std::string& env_prefix = "") {
  const std::string out_path = scratch() + "/_stdout";
  const std::string err_path = scratch() + "/_stderr";
  const std::string cmd = env_prefix + "\"" + cli_path() + "\" " + args +
                          " >" + out_path + " 2>" + err_path;
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<const std::vector<double>*>& columns) {
  std::string text = header + "\n";
  const std::size_t n = columns.front()->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) text += ',';
      text += format_double((*columns[c])[i]);
    }
    text += '\n';
  }
  spit(path, text);
}

// One-mediator linear dataset written as s,m,y,x.
std::string linear_csv() {
  static const std::string path = [] {
    const std::size_t n = 60;
    rng::Engine e(501);
    std::vector<double> s(n), x(n), m(n), y(n);
    for (auto& v : s) v = e.next_bernoulli(0.5);
    for (auto& v : x) v = e.next_normal();
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = 0.6 * s[i] + 0.3 * x[i] + 0.5 * e.next_normal();
    }
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0.6 * m[i] + 0.5 * s[i] + 0.3 * x[i] + 0.5 * e.next_normal();
    }
    const std::string p = scratch() + "/linear.csv";
    write_csv(p, "s,m,y,x", {&s, &m, &y, &x});
    return p;
  }();
  return path;
}

// Three-mediator linear dataset written as s,m1,m2,m3,y,x; only m1 carries
// a path.
std::string multi_csv() {
  static const std::string path = [] {
    const std::size_t n = 90;
    rng::Engine e(502);
    std::vector<double> s(n), x(n), y(n);
    std::vector<std::vector<double>> m(3, std::vector<double>(n));
    for (auto& v : s) v = e.next_bernoulli(0.5);
    for (auto& v : x) v = e.next_normal();
    const double alpha[3] = {1.0, 0.0, 0.0};
    const double beta[3] = {1.0, 0.0, 0.0};
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        m[j][i] = alpha[j] * s[i] + 0.3 * x[i] + 0.5 * e.next_normal();
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double mean = 0.5 * s[i] + 0.3 * x[i];
      for (std::size_t j = 0; j < 3; ++j) mean += beta[j] * m[j][i];
      y[i] = mean + 0.5 * e.next_normal();
    }
    const std::string p = scratch() + "/multi.csv";
    write_csv(p, "s,m1,m2,m3,y,x", {&s, &m[0], &m[1], &m[2], &y, &x});
    return p;
  }();
  return path;
}

// Binary mediator, continuous outcome, written as s,m,y.
std::string glm_csv() {
  static const std::string path = [] {
    const std::size_t n = 120;
    rng::Engine e(503);
    std::vector<double> s(n), m(n), y(n);
    for (auto& v : s) v = e.next_bernoulli(0.5);
    for (std::size_t i = 0; i < n; ++i) {
      const double eta = -0.5 + 1.2 * s[i];
      m[i] = e.next_uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0.5 + 0.8 * m[i] + 0.4 * s[i] + 0.5 * e.next_normal();
    }
    const std::string p = scratch() + "/glm.csv";
    write_csv(p, "s,m,y", {&s, &m, &y});
    return p;
  }();
  return path;
}

std::string roles_linear() {
  return "--data \"" + linear_csv() +
         "\" --exposure s --mediator m --outcome y --covariate x";
}

ordered_json parse_stdout(const CmdResult& r) {
  ordered_json j;
  REQUIRE_NOTHROW(j = ordered_json::parse(r.out));
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("help, version, and argument errors") {
  CHECK(run_cli_process("--help").exit_code == 0);
  const CmdResult help = run_cli_process("--help");
  CHECK(help.out.find("simulate") != std::string::npos);

  const CmdResult version = run_cli_process("--version");
  CHECK(version.exit_code == 0);
  CHECK(version.out.find(kToolVersion) != std::string::npos);

  CHECK(run_cli_process("").exit_code == 2);           // a subcommand is required
  CHECK(run_cli_process("transmogrify").exit_code == 2);
  CHECK(run_cli_process("run --data x.csv").exit_code == 2);  // missing flags
  CHECK(run_cli_process("run " + roles_linear() +
                        " --method poc-ab --bogus-flag 3")
            .exit_code == 2);
}

TEST_CASE("run emits a versioned JSON report matching the library") {
  const CmdResult r = run_cli_process(
      "run " + roles_linear() +
      " --method poc-ab -B 199 --seed 7 --omega 0.05,0.10");
  REQUIRE(r.exit_code == 0);
  const ordered_json j = parse_stdout(r);
  CHECK(j.at("schema") == "medboot/1");
  CHECK(j.at("tool") == "medboot");
  CHECK(j.at("command") == "run");
  CHECK(j.at("wall_time_s").get<double>() >= 0.0);
  CHECK(r.out.find("\"workers\"") == std::string::npos);

  const auto& rec = j.at("records").at(0).at("result");
  CHECK(rec.at("draws").size() == 199);
  REQUIRE(rec.at("decisions").size() == 2);
  CHECK(rec.at("decisions").at(1).at("omega").get<double>() == 0.1);

  // The binary and the library agree bit for bit.
  ColumnRoleMap roles;
  roles.exposure = "s";
  roles.mediators = {"m"};
  roles.outcome = "y";
  roles.covariates = {"x"};
  const Dataset data = parse_dataset_csv(linear_csv(), roles);
  AbConfig cfg;
  cfg.bootstrap.b = 199;
  cfg.bootstrap.seed = 7;
  cfg.omega_grid = {0.05, 0.10};
  const TestResult direct = adaptive_poc_test(data, cfg);
  CHECK(bits_equal(rec.at("p_value").get<double>(), direct.p_value));
  CHECK(bits_equal(rec.at("estimate").get<double>(), direct.estimate));
}

TEST_CASE("file outputs are timing-free and round-trip") {
  const std::string out = scratch() + "/run.json";
  const std::string csv = scratch() + "/run.csv";
  const CmdResult r = run_cli_process(
      "run " + roles_linear() + " --method js-ab -B 99 --seed 11 --out \"" +
      out + "\" --csv \"" + csv + "\"");
  REQUIRE(r.exit_code == 0);

  const std::string file_text = slurp(out);
  CHECK(file_text.find("wall_time_s") == std::string::npos);

  // stdout == file + the timing field.
  ordered_json j = parse_stdout(r);
  j.erase("wall_time_s");
  CHECK(j == ordered_json::parse(file_text));

  // Parse -> rebuild -> dump reproduces the file bytes exactly.
  const AnalysisReport report =
      report_from_json(ordered_json::parse(file_text));
  CHECK(report_json(report).dump(2) + "\n" == file_text);

  const std::string table = slurp(csv);
  CHECK(table.rfind("label,step,method,omega,", 0) == 0);
  CHECK(table.find("js-ab,0,js-ab,0.05,") != std::string::npos);
}

TEST_CASE("worker count and the environment default never change outputs") {
  const std::string args = "run " + roles_linear() +
                           " --method poc-ab -B 149 --seed 3 --out \"" +
                           scratch() + "/w%.json\" --csv \"" + scratch() +
                           "/w%.csv\"";
  auto with = [&](const std::string& tag, const std::string& extra,
                  const std::string& env) {
    std::string cmd = args;
    const auto at = cmd.find('%');
    cmd.replace(at, 1, tag);
    cmd.replace(cmd.find('%'), 1, tag);
    REQUIRE(run_cli_process(cmd + extra, env).exit_code == 0);
  };
  with("1", " --workers 1", "");
  with("3", " --workers 3", "");
  with("env", "", "MEDBOOT_WORKERS=2 ");
  const std::string j1 = slurp(scratch() + "/w1.json");
  CHECK(j1 == slurp(scratch() + "/w3.json"));
  CHECK(j1 == slurp(scratch() + "/wenv.json"));
  const std::string c1 = slurp(scratch() + "/w1.csv");
  CHECK(c1 == slurp(scratch() + "/w3.csv"));
  CHECK(c1 == slurp(scratch() + "/wenv.csv"));
}

TEST_CASE("plug-in and GLM methods run end to end") {
  const CmdResult sobel =
      run_cli_process("run " + roles_linear() + " --method poc-sobel");
  REQUIRE(sobel.exit_code == 0);
  const ordered_json js = parse_stdout(sobel);
  CHECK(js.at("records").at(0).at("result").at("draws").empty());

  const CmdResult joint = run_cli_process(
      "run --data \"" + multi_csv() +
      "\" --exposure s --mediator m1,m2,m3 --outcome y --covariate x "
      "--method joint-ab -B 99 --seed 2");
  CHECK(joint.exit_code == 0);

  const CmdResult glm = run_cli_process(
      "run --data \"" + glm_csv() +
      "\" --exposure s --mediator m --outcome y --method glm2-ab -B 79 "
      "--seed 5 --s 1 --s-star 0");
  REQUIRE(glm.exit_code == 0);

  ColumnRoleMap roles;
  roles.exposure = "s";
  roles.mediators = {"m"};
  roles.outcome = "y";
  const Dataset data = parse_dataset_csv(glm_csv(), roles);
  GlmConfig cfg;
  cfg.ab.bootstrap.b = 79;
  cfg.ab.bootstrap.seed = 5;
  NieQuery query;
  query.s = 1.0;
  query.s_star = 0.0;
  const TestResult direct =
      adaptive_glm_test(data, GlmScenario::linear_outcome, query, cfg);
  CHECK(bits_equal(parse_stdout(glm)
                       .at("records")
                       .at(0)
                       .at("result")
                       .at("p_value")
                       .get<double>(),
                   direct.p_value));
}

TEST_CASE("input failures exit with code 2 and a named error") {
  const CmdResult missing = run_cli_process(
      "run --data \"" + linear_csv() +
      "\" --exposure s --mediator m --outcome zz --method poc-ab");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("MissingColumn") != std::string::npos);

  spit(scratch() + "/bad.csv", "s,m,y\n1,2,3\n0,NA,2\n");
  const CmdResult bad = run_cli_process(
      "run --data \"" + scratch() +
      "/bad.csv\" --exposure s --mediator m --outcome y --method poc-ab");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("NonNumericCell") != std::string::npos);
  CHECK(bad.err.find("row 2, column 'm'") != std::string::npos);

  spit(scratch() + "/empty.csv", "");
  const CmdResult empty = run_cli_process(
      "run --data \"" + scratch() +
      "/empty.csv\" --exposure s --mediator m --outcome y --method poc-ab");
  CHECK(empty.exit_code == 2);
  CHECK(empty.err.find("EmptyFile") != std::string::npos);

  const CmdResult absent = run_cli_process(
      "run --data \"" + scratch() +
      "/nope.csv\" --exposure s --mediator m --outcome y --method poc-ab");
  CHECK(absent.exit_code == 2);

  const CmdResult wrong_tag = run_cli_process(
      "run " + roles_linear() + " --method warp-drive");
  CHECK(wrong_tag.exit_code == 2);

  const CmdResult multi_poc = run_cli_process(
      "run --data \"" + multi_csv() +
      "\" --exposure s --mediator m1,m2,m3 --outcome y --method poc-ab");
  CHECK(multi_poc.exit_code == 2);
  CHECK(multi_poc.err.find("exactly one mediator") != std::string::npos);

  const CmdResult bad_x = run_cli_process(
      "run " + roles_linear() +
      " --method glm2-ab --at-x 0.5,0.5");  // one covariate, two values
  CHECK(bad_x.exit_code == 2);

  const CmdResult bad_out = run_cli_process(
      "run " + roles_linear() +
      " --method poc-sobel --out /nonexistent-dir/x.json");
  CHECK(bad_out.exit_code == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  // A constant mediator is collinear with the intercept in the outcome
  // model, so the fit reports a singular design.
  const std::size_t n = 40;
  rng::Engine e(504);
  std::vector<double> s(n), m(n, 1.0), y(n);
  for (auto& v : s) v = e.next_bernoulli(0.5);
  for (auto& v : y) v = e.next_normal();
  write_csv(scratch() + "/flat.csv", "s,m,y", {&s, &m, &y});

  const CmdResult r = run_cli_process(
      "run --data \"" + scratch() +
      "/flat.csv\" --exposure s --mediator m --outcome y --method poc-ab");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("SingularDesign") != std::string::npos);
}

TEST_CASE("screen runs the two-step pipeline end to end") {
  const std::string out = scratch() + "/screen.json";
  const std::string csv = scratch() + "/screen.csv";
  const CmdResult r = run_cli_process(
      "screen --data \"" + multi_csv() +
      "\" --exposure s --mediator m1,m2,m3 --outcome y --covariate x "
      "--screen-fraction 0.34 --fdr-q 0.2 --split 0.6 -B 149 --seed 11 "
      "--out \"" + out + "\" --csv \"" + csv + "\"");
  REQUIRE(r.exit_code == 0);
  ordered_json j = parse_stdout(r);
  CHECK(j.at("command") == "screen");
  CHECK(j.at("screen").at("split_a").size() == 54);  // 0.6 * 90
  CHECK(j.at("screen").at("split_b").size() == 36);
  CHECK(!j.at("screen").at("retained").empty());

  // The stdout report equals the library result with the role echo added.
  ColumnRoleMap roles;
  roles.exposure = "s";
  roles.mediators = {"m1", "m2", "m3"};
  roles.outcome = "y";
  roles.covariates = {"x"};
  const Dataset data = parse_dataset_csv(multi_csv(), roles);
  ScreenOptions options;
  options.screen_fraction = 0.34;
  options.fdr_q = 0.2;
  options.split_fraction = 0.6;
  options.ab.bootstrap.b = 149;
  options.ab.bootstrap.seed = 11;
  AnalysisReport expected = screen_then_joint(data, options);
  expected.config["data"] = multi_csv();
  expected.config["exposure"] = "s";
  expected.config["mediators"] = std::vector<std::string>{"m1", "m2", "m3"};
  expected.config["outcome"] = "y";
  expected.config["covariates"] = std::vector<std::string>{"x"};
  j.erase("wall_time_s");
  CHECK(j == report_json(expected));
  CHECK(slurp(csv) == report_csv(expected));
  CHECK(slurp(out) == report_json(expected).dump(2) + "\n");
}

TEST_CASE("simulate runs a null study from a flat JSON config") {
  const std::string config = scratch() + "/null.json";
  spit(config, R"({"study":"null","scenario":"linear","n":60,"reps":3,
    "seed":5,"methods":["poc-ab","poc-sobel"],"b":99})");
  const std::string prefix = scratch() + "/null_a";
  const CmdResult r = run_cli_process("simulate --config \"" + config +
                                      "\" --workers 1 --csv \"" + prefix +
                                      "\"");
  REQUIRE(r.exit_code == 0);
  const ordered_json j = parse_stdout(r);
  CHECK(j.at("command") == "simulate");
  CHECK(j.at("record_count") == 6);
  CHECK(j.at("failures") == 0);
  CHECK(j.at("summary").size() == 2);
  CHECK(j.at("config").at("scenario") == "linear");
  CHECK(r.out.find("\"workers\"") == std::string::npos);

  // CSV bytes match the library's emission for the same study.
  SimSpec spec = make_sim_spec(SimScenario::linear);
  spec.n = 60;
  spec.reps = 3;
  spec.seed = 5;
  spec.workers = 1;
  AbConfig ab;
  ab.bootstrap.b = 99;
  spec.methods = {make_method("poc-ab", ab), make_method("poc-sobel", ab)};
  const SimulationReport expected = run_null_study(spec);
  CHECK(slurp(prefix + ".pvalues.csv") == pvalues_csv(expected));
  CHECK(slurp(prefix + ".summary.csv") == summary_csv(expected));

  // A different worker count gives the same bytes.
  const std::string prefix_b = scratch() + "/null_b";
  REQUIRE(run_cli_process("simulate --config \"" + config +
                          "\" --workers 3 --csv \"" + prefix_b + "\"")
              .exit_code == 0);
  CHECK(slurp(prefix + ".pvalues.csv") == slurp(prefix_b + ".pvalues.csv"));
  CHECK(slurp(prefix + ".summary.csv") == slurp(prefix_b + ".summary.csv"));
}

TEST_CASE("simulate runs a power study and writes the power table") {
  const std::string config = scratch() + "/power.json";
  spit(config, R"({"study":"power","scenario":"linear","n":60,"reps":2,
    "seed":5,"methods":["poc-ab"],"b":99,"grid":[0,0.5],"omega":0.05})");
  const std::string prefix = scratch() + "/power";
  const CmdResult r = run_cli_process("simulate --config \"" + config +
                                      "\" --workers 1 --csv \"" + prefix +
                                      "\"");
  REQUIRE(r.exit_code == 0);
  const ordered_json j = parse_stdout(r);
  CHECK(j.at("power").size() == 2);
  CHECK(j.at("summary").empty());
  CHECK(j.at("config").at("grid") == ordered_json::array({0, 0.5}));
  const std::string table = slurp(prefix + ".power.csv");
  CHECK(table.rfind("signal,method,power\n", 0) == 0);
  CHECK(!std::filesystem::exists(prefix + ".summary.csv"));
}

TEST_CASE("config typos and contradictions fail fast") {
  auto simulate_with = [&](const std::string& name, const std::string& body) {
    const std::string path = scratch() + "/" + name;
    spit(path, body);
    return run_cli_process("simulate --config \"" + path + "\"");
  };

  const CmdResult unknown = simulate_with(
      "unknown.json",
      R"({"scenario":"linear","methods":["poc-ab"],"reps":1,"bogus":1})");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("bogus") != std::string::npos);

  CHECK(simulate_with("nomethods.json", R"({"scenario":"linear","reps":1})")
            .exit_code == 2);
  CHECK(simulate_with("noscenario.json", R"({"methods":["poc-ab"]})")
            .exit_code == 2);
  CHECK(simulate_with("badjson.json", "{ not json").exit_code == 2);
  CHECK(simulate_with(
            "casemix.json",
            R"({"scenario":"linear","methods":["poc-ab"],"grid":[0.1]})")
            .exit_code == 2);  // power keys in a null study
  CHECK(simulate_with(
            "nogrid.json",
            R"({"study":"power","scenario":"linear","methods":["poc-ab"]})")
            .exit_code == 2);
  CHECK(simulate_with("badtag.json",
                      R"({"scenario":"linear","methods":["joint-ab"]})")
            .exit_code == 2);  // scenario-incompatible tag
  const CmdResult badtype = simulate_with(
      "badtype.json", R"({"scenario":"linear","methods":["poc-ab"],"n":"x"})");
  CHECK(badtype.exit_code == 2);
  CHECK(badtype.err.find("'n'") != std::string::npos);
}

TEST_CASE("tune and confirm produce diagnostics JSON") {
  const CmdResult tune = run_cli_process(
      "tune " + roles_linear() +
      " --grid 0,2 --b-outer 40 --b-inner 59 --seed 2 --workers 1");
  REQUIRE(tune.exit_code == 0);
  const ordered_json tj = parse_stdout(tune);
  CHECK(tj.at("command") == "tune");
  // Strong paths on both legs: the non-degenerate branch keeps the default.
  CHECK(tj.at("degenerate_case") == false);
  CHECK(tj.at("lambda") == 2.0);
  CHECK(tj.at("grid").empty());
  CHECK(tj.at("alpha_shape").contains("fraction_below_005"));

  const CmdResult confirm = run_cli_process(
      "confirm " + roles_linear() +
      " --b-outer 30 --b-inner 49 --seed 2 --workers 1");
  REQUIRE(confirm.exit_code == 0);
  const ordered_json cj = parse_stdout(confirm);
  CHECK(cj.at("command") == "confirm");
  CHECK(!cj.at("pattern").get<std::string>().empty());
  CHECK(cj.at("observed").at("p_values").size() <= 30);
  CHECK(cj.at("observed").at("shape").contains("uniform"));
}
