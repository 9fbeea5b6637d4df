#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "adiaspec/error.hpp"
#include "adiaspec/potential.hpp"

namespace adiaspec::cli {

struct EnergySelection {
  enum class Mode { maximizer, window, range, list };
  Mode mode = Mode::maximizer;
  int count = 20;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> values;
};

struct CocycleSettings {
  double periods = 200.0;  // L = periods * 2 pi / epsilon
  double z = 0.0;
  long iterations = 10000;
  int z_samples = 8;
  std::uint64_t seed = 1;
};

struct Tolerances {
  double edge = 1e-10;
  double quadrature = 1e-10;
  double ode = 1e-12;
};

struct RunConfig {
  std::string v_type = "trig";  // trig | steps
  std::vector<Harmonic> v_terms;
  std::vector<Step> v_steps;
  std::vector<Harmonic> w_terms;
  double strip_half_width = 0.0;
  int n = 1;
  int m = 0;
  std::optional<double> ceiling;
  EnergySelection energies;
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  CocycleSettings cocycle;
  Tolerances tolerances;
  double max_relative_error = 0.2;
  std::string out_dir;
  std::vector<std::string> formats{"csv", "json"};

  PeriodicPotential fast_potential() const;
};

/// Throws Error(invalid_input) on malformed or inconsistent input.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

/// Normalized echo of the configuration, embedded in every output.
nlohmann::json config_json(const RunConfig& config);

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct CommandResult {
  std::string command;
  Table table;
  nlohmann::json extra = nlohmann::json::object();
  int exit_code = 0;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"bands", "geometry", "actions",
                                              "stokes", "cocycle", "verify"};
  return names;
}

/// Runs one subcommand. Independent cells are spread over `threads` workers;
/// row order never depends on scheduling.
CommandResult run_command(const std::string& name, const RunConfig& config, int threads = 1);

std::string to_csv(const Table& table);
nlohmann::json to_json(const CommandResult& result, const RunConfig& config);

/// Exit status for an error kind: 2 input, 3 assumption, 4 numeric.
int exit_code_for(ErrorKind kind);

/// Full command-line driver; returns the process exit status.
int run(int argc, char** argv);

}  // namespace adiaspec::cli
