#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adiaspec/cli.hpp"

using namespace adiaspec;
using namespace adiaspec::cli;

namespace {

const char* kBase = R"(
v:
  terms: [{frequency: 1, cos: 2.0}]
w:
  terms: [{frequency: 1, cos: 6.5}]
  strip_half_width: 0.5
)";

std::string with(const std::string& extra) { return std::string(kBase) + extra; }

ErrorKind parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::consistency;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "adiaspec_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "adiaspec");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config defaults and fields") {
  const auto c = parse_config(with("n: 2\nm: 1\nepsilons: [0.3]\ncocycle: {seed: 42, z: 0.25}\n"));
  CHECK(c.n == 2);
  CHECK(c.m == 1);
  CHECK(c.epsilons == std::vector<double>{0.3});
  CHECK(c.cocycle.seed == 42);
  CHECK(c.cocycle.z == 0.25);
  CHECK(c.cocycle.periods == 200.0);
  CHECK(c.tolerances.edge == 1e-10);
  CHECK(c.energies.mode == EnergySelection::Mode::maximizer);
  REQUIRE(c.w_terms.size() == 1);
  CHECK(c.w_terms[0].cos_amp == 6.5);
  CHECK(c.strip_half_width == 0.5);

  const auto j = config_json(c);
  CHECK(j["cocycle"]["seed"] == 42);
  CHECK(j["n"] == 2);

  const auto steps = parse_config(R"(
v:
  type: steps
  steps: [{start: 0, value: 5}, {start: 0.5, value: 0}]
w: {terms: [{frequency: 1, cos: 1}], strip_half_width: 1}
energies: {mode: range, min: 1, max: 2, count: 3}
)");
  CHECK(steps.v_steps.size() == 2);
  CHECK(steps.fast_potential()(0.25) == 5.0);
  CHECK(steps.energies.mode == EnergySelection::Mode::range);
}

TEST_CASE("malformed configs are input errors") {
  CHECK(parse_error("v: [") == ErrorKind::invalid_input);
  CHECK(parse_error("w: {terms: [{frequency: 1, cos: 1}], strip_half_width: 1}") ==
        ErrorKind::invalid_input);
  CHECK(parse_error(with("typo: 1\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("n: 0\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("epsilons: []\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("epsilons: [-0.1]\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("tolerances: {ode: 0}\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("energies: {mode: list, values: []}\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("energies: {mode: range, min: 2, max: 1}\n")) == ErrorKind::invalid_input);
  CHECK(parse_error(with("output: {formats: [xml]}\n")) == ErrorKind::invalid_input);
  CHECK(parse_error("v: {terms: []}\nw: {terms: [{frequency: 1, cos: 1}]}\n") ==
        ErrorKind::invalid_input);
  CHECK(parse_error("v: {type: nope}\nw: {terms: [{frequency: 1, cos: 1}], strip_half_width: 1}") ==
        ErrorKind::invalid_input);
}

TEST_CASE("csv formatting") {
  Table t{{"a", "b", "c", "d"}, {{1.0 / 3.0, 7LL, std::string("g0"), true}}};
  CHECK(to_csv(t) == "a,b,c,d\n0.33333333333333331,7,g0,true\n");
}

TEST_CASE("bands command") {
  const auto c = parse_config(with(""));
  const auto r = run_command("bands", c);
  CHECK(r.exit_code == 0);
  REQUIRE(r.table.rows.size() >= 3);
  CHECK(std::get<std::string>(r.table.rows[0][0]) == "band");
  CHECK(std::get<double>(r.table.rows[0][2]) == doctest::Approx(-0.0506038419984084).epsilon(1e-10));
  CHECK(r.extra["admissible"]["maximizer"].get<double>() == doctest::Approx(3.3569385768325));
  const auto j = to_json(r, c);
  CHECK(j["seed"] == 1);
  CHECK(j["config"]["w"]["strip_half_width"] == 0.5);
  CHECK(j["rows"].size() == r.table.rows.size());
}

TEST_CASE("actions and geometry rows") {
  const auto c = parse_config(with("energies: {mode: window, count: 3}\n"));
  const auto a = run_command("actions", c);
  CHECK(a.exit_code == 0);
  REQUIRE(a.table.rows.size() == 6);
  for (const auto& row : a.table.rows) {
    CHECK(std::get<double>(row[2]) > 0.0);
    CHECK(std::get<std::string>(row.back()) == "ok");
  }
  CHECK(a.table.columns[4] == "t_eps_0.2");
  const auto g = run_command("geometry", c);
  CHECK(g.exit_code == 0);
  CHECK(g.table.rows.size() == 3 * 8);
}

TEST_CASE("energies outside the window give assumption failures") {
  const auto c = parse_config(with("energies: {mode: list, values: [3.35, 100]}\n"));
  const auto g = run_command("geometry", c);
  CHECK(g.exit_code == 3);
  CHECK(std::get<std::string>(g.table.rows.back().back()) == "assumption-failure");
  CHECK(std::get<std::string>(g.table.rows.front().back()) == "ok");

  const auto none = parse_config(with("n: 3\n"));
  try {
    run_command("actions", none);
    FAIL("expected an assumption failure");
  } catch (const Error& e) {
    CHECK(exit_code_for(e.kind()) == 3);
  }
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::invalid_input) == 2);
  CHECK(exit_code_for(ErrorKind::assumption_failure) == 3);
  CHECK(exit_code_for(ErrorKind::convergence_failure) == 4);
  CHECK(exit_code_for(ErrorKind::degeneracy) == 4);

  const auto cfg = scratch("ok.yaml");
  std::ofstream(cfg) << with("");
  CHECK(run_args({"bands", "--config", cfg.string(), "--out", scratch("out").string()}) == 0);
  CHECK(std::filesystem::exists(scratch("out") / "bands.csv"));
  CHECK(std::filesystem::exists(scratch("out") / "bands.json"));
  CHECK(run_args({"bands"}) == 2);
  CHECK(run_args({"frobnicate", "--config", cfg.string()}) == 2);
  CHECK(run_args({"bands", "--config", scratch("missing.yaml").string()}) == 2);
  CHECK(run_args({"bands", "--config", cfg.string(), "--format", "xml"}) == 2);

  const auto bad = scratch("bad.yaml");
  std::ofstream(bad) << with("n: 3\n");
  CHECK(run_args({"actions", "--config", bad.string(), "--out", scratch("out3").string()}) == 3);
}

TEST_CASE("seed override and byte-identical reruns") {
  const auto cfg = scratch("det.yaml");
  std::ofstream(cfg) << with(
      "energies: {mode: window, count: 3}\nepsilons: [0.2]\ncocycle: {periods: 20, iterations: 500}\n");
  for (const std::string cmd : {"geometry", "actions", "cocycle"}) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run_args({cmd, "--config", cfg.string(), "--out", a.string(), "--seed", "9"}) == 0);
    REQUIRE(run_args({cmd, "--config", cfg.string(), "--out", b.string(), "--seed", "9",
                      "--threads", "3"}) == 0);
    CHECK(slurp(a / (cmd + ".csv")) == slurp(b / (cmd + ".csv")));
    CHECK(slurp(a / (cmd + ".json")) == slurp(b / (cmd + ".json")));
    CHECK(slurp(a / (cmd + ".json")).find("\"seed\": 9") != std::string::npos);
  }
}
