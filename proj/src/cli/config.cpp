#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "adiaspec/cli.hpp"

namespace adiaspec::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::invalid_input, "config: " + what); }

void check_keys(const YAML::Node& node, const std::string& where, std::set<std::string> allowed) {
  if (!node.IsMap()) bad(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, T fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    bad("cannot read '" + key + "'");
  }
}

double positive(double x, const std::string& what) {
  if (!(std::isfinite(x) && x > 0.0)) bad(what + " must be positive");
  return x;
}

std::vector<Harmonic> read_terms(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsSequence()) bad(where + ".terms must be a list");
  std::vector<Harmonic> out;
  for (const auto& t : node) {
    check_keys(t, where + ".terms[]", {"frequency", "cos", "sin"});
    Harmonic h{get<int>(t, "frequency", 0), get<double>(t, "cos", 0.0), get<double>(t, "sin", 0.0)};
    if (h.frequency < 1) bad(where + ": frequencies must be positive integers");
    if (!std::isfinite(h.cos_amp) || !std::isfinite(h.sin_amp)) bad(where + ": non-finite amplitude");
    out.push_back(h);
  }
  return out;
}

}  // namespace

PeriodicPotential RunConfig::fast_potential() const {
  if (v_type == "steps") return PeriodicPotential::piecewise_constant(v_steps);
  return PeriodicPotential::trig_sum(v_terms);
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    bad(std::string("YAML syntax: ") + e.what());
  }
  check_keys(root, "top level",
             {"v", "w", "n", "m", "ceiling", "energies", "epsilons", "cocycle", "tolerances",
              "verify", "output"});
  RunConfig c;

  const auto v = root["v"];
  if (!v) bad("missing 'v'");
  check_keys(v, "v", {"type", "terms", "steps"});
  c.v_type = get<std::string>(v, "type", "trig");
  if (c.v_type == "trig") {
    c.v_terms = read_terms(v["terms"], "v");
  } else if (c.v_type == "zero") {
    c.v_type = "trig";
  } else if (c.v_type == "steps") {
    if (!v["steps"] || !v["steps"].IsSequence()) bad("v.steps must be a list");
    for (const auto& s : v["steps"]) {
      check_keys(s, "v.steps[]", {"start", "value"});
      c.v_steps.push_back({get<double>(s, "start", 0.0), get<double>(s, "value", 0.0)});
    }
  } else {
    bad("v.type must be trig, steps or zero");
  }

  const auto w = root["w"];
  if (!w) bad("missing 'w'");
  check_keys(w, "w", {"terms", "strip_half_width"});
  c.w_terms = read_terms(w["terms"], "w");
  if (c.w_terms.empty()) bad("w needs at least one term");
  c.strip_half_width = positive(get<double>(w, "strip_half_width", 0.0), "w.strip_half_width");

  c.n = get<int>(root, "n", 1);
  c.m = get<int>(root, "m", 0);
  if (c.n < 1 || c.m < 0) bad("need n >= 1 and m >= 0");
  if (root["ceiling"]) c.ceiling = positive(root["ceiling"].as<double>(), "ceiling");

  if (const auto e = root["energies"]) {
    check_keys(e, "energies", {"mode", "count", "min", "max", "values"});
    const auto mode = get<std::string>(e, "mode", "maximizer");
    auto& sel = c.energies;
    sel.count = get<int>(e, "count", 20);
    if (mode == "maximizer") {
      sel.mode = EnergySelection::Mode::maximizer;
    } else if (mode == "window") {
      sel.mode = EnergySelection::Mode::window;
    } else if (mode == "range") {
      sel.mode = EnergySelection::Mode::range;
      sel.min = get<double>(e, "min", NAN);
      sel.max = get<double>(e, "max", NAN);
      if (!(sel.min <= sel.max)) bad("energies: need min <= max");
    } else if (mode == "list") {
      sel.mode = EnergySelection::Mode::list;
      sel.values = get<std::vector<double>>(e, "values", {});
      if (sel.values.empty()) bad("energies: empty list");
      for (double x : sel.values)
        if (!std::isfinite(x)) bad("energies: non-finite value");
    } else {
      bad("energies.mode must be maximizer, window, range or list");
    }
    if (sel.count < 1) bad("energies.count must be >= 1");
  }

  if (root["epsilons"]) {
    c.epsilons = get<std::vector<double>>(root, "epsilons", {});
    if (c.epsilons.empty()) bad("epsilons must be a non-empty list");
    for (double x : c.epsilons) positive(x, "epsilon");
  }

  if (const auto k = root["cocycle"]) {
    check_keys(k, "cocycle", {"periods", "z", "iterations", "z_samples", "seed"});
    c.cocycle.periods = positive(get<double>(k, "periods", 200.0), "cocycle.periods");
    c.cocycle.z = get<double>(k, "z", 0.0);
    c.cocycle.iterations = get<long>(k, "iterations", 10000);
    c.cocycle.z_samples = get<int>(k, "z_samples", 8);
    c.cocycle.seed = get<std::uint64_t>(k, "seed", 1);
    if (c.cocycle.iterations < 1 || c.cocycle.z_samples < 1)
      bad("cocycle.iterations and cocycle.z_samples must be >= 1");
  }

  if (const auto t = root["tolerances"]) {
    check_keys(t, "tolerances", {"edge", "quadrature", "ode"});
    c.tolerances.edge = positive(get<double>(t, "edge", 1e-10), "tolerances.edge");
    c.tolerances.quadrature = positive(get<double>(t, "quadrature", 1e-10), "tolerances.quadrature");
    c.tolerances.ode = positive(get<double>(t, "ode", 1e-12), "tolerances.ode");
  }

  if (const auto vr = root["verify"]) {
    check_keys(vr, "verify", {"max_relative_error"});
    c.max_relative_error = positive(get<double>(vr, "max_relative_error", 0.2),
                                    "verify.max_relative_error");
  }

  if (const auto o = root["output"]) {
    check_keys(o, "output", {"directory", "formats"});
    c.out_dir = get<std::string>(o, "directory", "");
    if (o["formats"]) {
      c.formats = get<std::vector<std::string>>(o, "formats", {});
      if (c.formats.empty()) bad("output.formats must not be empty");
      for (const auto& f : c.formats)
        if (f != "csv" && f != "json") bad("unknown output format '" + f + "'");
    }
  }

  // Build the potentials once so that bad shapes surface as input errors.
  c.fast_potential();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_input, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json config_json(const RunConfig& c) {
  using nlohmann::json;
  auto terms = [](const std::vector<Harmonic>& ts) {
    json out = json::array();
    for (const auto& t : ts) out.push_back({{"frequency", t.frequency}, {"cos", t.cos_amp}, {"sin", t.sin_amp}});
    return out;
  };
  json v = {{"type", c.v_type}};
  if (c.v_type == "steps") {
    json steps = json::array();
    for (const auto& s : c.v_steps) steps.push_back({{"start", s.start}, {"value", s.value}});
    v["steps"] = steps;
  } else {
    v["terms"] = terms(c.v_terms);
  }
  static const char* modes[] = {"maximizer", "window", "range", "list"};
  json energies = {{"mode", modes[static_cast<int>(c.energies.mode)]}, {"count", c.energies.count}};
  if (c.energies.mode == EnergySelection::Mode::range) {
    energies["min"] = c.energies.min;
    energies["max"] = c.energies.max;
  }
  if (c.energies.mode == EnergySelection::Mode::list) energies["values"] = c.energies.values;
  json out = {
      {"v", v},
      {"w", {{"terms", terms(c.w_terms)}, {"strip_half_width", c.strip_half_width}}},
      {"n", c.n},
      {"m", c.m},
      {"energies", energies},
      {"epsilons", c.epsilons},
      {"cocycle",
       {{"periods", c.cocycle.periods},
        {"z", c.cocycle.z},
        {"iterations", c.cocycle.iterations},
        {"z_samples", c.cocycle.z_samples},
        {"seed", c.cocycle.seed}}},
      {"tolerances",
       {{"edge", c.tolerances.edge}, {"quadrature", c.tolerances.quadrature}, {"ode", c.tolerances.ode}}},
      {"verify", {{"max_relative_error", c.max_relative_error}}},
  };
  if (c.ceiling) out["ceiling"] = *c.ceiling;
  return out;
}

}  // namespace adiaspec::cli
