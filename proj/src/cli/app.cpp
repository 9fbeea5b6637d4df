#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adiaspec/cli.hpp"

namespace adiaspec::cli {

namespace {

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return fmt::format("{:.17g}", v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else return fmt::format("{}", v);
      },
      c);
}

nlohmann::json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        // JSON has no NaN; missing numbers become null.
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      c);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::invalid_input, "cannot write " + path.string());
  out << text;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const CommandResult& result, const RunConfig& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < result.table.columns.size(); ++i)
      obj[result.table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  return {{"command", result.command},
          {"seed", config.cocycle.seed},
          {"config", config_json(config)},
          {"columns", result.table.columns},
          {"rows", rows},
          {"details", result.extra},
          {"exit_code", result.exit_code}};
}

int run(int argc, char** argv) {
  CLI::App app{"Spectral geometry and Lyapunov exponents of adiabatically perturbed periodic operators"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, format;
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_given = true; }, "random seed");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto config = load_config(config_path);
    if (seed_given) config.cocycle.seed = seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    std::vector<std::string> formats = format.empty() ? config.formats : std::vector<std::string>{format};

    const auto result = run_command(command, config, threads);
    if (config.out_dir.empty()) {
      if (formats.front() == "json")
        std::cout << to_json(result, config).dump(2) << '\n';
      else
        std::cout << to_csv(result.table);
    } else {
      const std::filesystem::path dir(config.out_dir);
      std::filesystem::create_directories(dir);
      for (const auto& f : formats) {
        if (f == "csv") write_file(dir / (command + ".csv"), to_csv(result.table));
        if (f == "json") write_file(dir / (command + ".json"), to_json(result, config).dump(2) + "\n");
      }
    }
    if (result.extra.contains("verdict"))
      std::cerr << "verdict: " << result.extra["verdict"].get<std::string>() << '\n';
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace adiaspec::cli
