#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "adiaspec/actions.hpp"
#include "adiaspec/cli.hpp"
#include "adiaspec/cocycle.hpp"
#include "adiaspec/geometry.hpp"
#include "adiaspec/hill.hpp"

namespace adiaspec::cli {

namespace {

using nlohmann::json;
using Row = std::vector<Cell>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CellOut {
  std::vector<Row> rows;
  json info;
  int code = 0;
};

template <class F>
std::vector<CellOut> parallel_cells(std::size_t count, int threads, F&& body) {
  std::vector<CellOut> out(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) out[i] = body(i);
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// Runs `body`, turning a library error into a single status row.
template <class F>
CellOut guarded(F&& body, Row prefix, std::size_t width) {
  try {
    return body();
  } catch (const Error& e) {
    CellOut out;
    Row row = std::move(prefix);
    while (row.size() + 1 < width) row.emplace_back(kNaN);
    row.emplace_back(std::string(to_string(e.kind())));
    out.rows.push_back(std::move(row));
    out.info = {{"error", e.what()}};
    out.code = exit_code_for(e.kind());
    return out;
  }
}

CommandResult collect(std::string name, std::vector<std::string> columns, std::vector<CellOut> cells) {
  CommandResult r;
  r.command = std::move(name);
  r.table.columns = std::move(columns);
  json info = json::array();
  for (auto& c : cells) {
    for (auto& row : c.rows) r.table.rows.push_back(std::move(row));
    info.push_back(std::move(c.info));
    r.exit_code = std::max(r.exit_code, c.code);
  }
  r.extra["cells"] = std::move(info);
  return r;
}

std::string eps_tag(double eps) { return fmt::format("{:g}", eps); }

struct Context {
  const RunConfig& cfg;
  AdiabaticModel model;

  explicit Context(const RunConfig& c)
      : cfg(c),
        model{c.fast_potential(), AnalyticPotential(c.w_terms, c.strip_half_width), {},
              c.tolerances.ode} {
    const auto& v = model.v;
    const double k = c.n + c.m + 1;
    double ceiling = pi * pi * k * k + v.upper_bound() + 1.0;
    if (c.energies.mode == EnergySelection::Mode::range)
      ceiling = std::max(ceiling, c.energies.max - model.w.w_minus() + 1.0);
    if (c.energies.mode == EnergySelection::Mode::list)
      ceiling = std::max(ceiling, *std::max_element(c.energies.values.begin(), c.energies.values.end()) -
                                      model.w.w_minus() + 1.0);
    if (c.ceiling) ceiling = *c.ceiling;
    BandSearchOptions opt;
    opt.edge_tolerance = c.tolerances.edge;
    opt.ode_tolerance = c.tolerances.ode;
    model.bands = band_edges(model.v, ceiling, opt);
  }

  AdmissibleInterval window() const { return admissible_interval(model.w, model.bands, cfg.n, cfg.m); }

  std::vector<double> energies() const {
    const auto& sel = cfg.energies;
    using Mode = EnergySelection::Mode;
    std::vector<double> out;
    if (sel.mode == Mode::list) return sel.values;
    if (sel.mode == Mode::range) {
      for (int i = 0; i < sel.count; ++i)
        out.push_back(sel.count == 1 ? sel.min : sel.min + (sel.max - sel.min) * i / (sel.count - 1));
      return out;
    }
    const auto j = window();
    if (j.empty())
      fail(ErrorKind::assumption_failure,
           fmt::format("no admissible energy for n = {}, m = {}", cfg.n, cfg.m));
    if (sel.mode == Mode::maximizer) return {j.maximizer};
    for (int i = 0; i < sel.count; ++i)
      out.push_back(j.lower + (j.upper - j.lower) * (i + 1) / (sel.count + 1));
    return out;
  }

  IsoEnergyGeometry geometry(double e) const {
    const auto report = analyze_window(model.w, model.bands, e, cfg.n, cfg.m);
    if (!report.all_ok())
      fail(ErrorKind::assumption_failure, fmt::format("window check fails at E = {:.17g}", e));
    return branch_points(model.w, model.bands, report);
  }
};

json window_json(const WindowReport& r) {
  json margins = json::object();
  for (const auto& m : r.margins) margins[m.edge] = m.value;
  return {{"a1", r.a1_ok}, {"a2", r.a2_ok}, {"a3", r.a3_ok}, {"min_margin", r.min_margin()},
          {"margins", margins}};
}

// ---------------------------------------------------------------------------

CommandResult cmd_bands(const Context& ctx) {
  const auto& b = ctx.model.bands;
  CommandResult r;
  r.command = "bands";
  r.table.columns = {"kind", "index", "lower", "upper", "open"};
  const auto intervals = b.band_intervals();
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const long long n = static_cast<long long>(i) + 1;
    r.table.rows.push_back({std::string("band"), n, intervals[i].first, intervals[i].second, true});
    if (b.has_edge(2 * static_cast<int>(n) + 1))
      r.table.rows.push_back({std::string("gap"), n, b.edge(2 * static_cast<int>(n)),
                              b.edge(2 * static_cast<int>(n) + 1), b.gap_is_open(static_cast<int>(n))});
  }
  r.extra["edges"] = b.edges;
  r.extra["ceiling"] = b.energy_ceiling;
  r.extra["w_plus"] = ctx.model.w.w_plus();
  r.extra["w_minus"] = ctx.model.w.w_minus();
  r.extra["zeta_star"] = ctx.model.w.zeta_star();
  try {
    const auto j = ctx.window();
    r.extra["admissible"] = {{"lower", j.lower}, {"upper", j.upper}, {"maximizer", j.maximizer},
                             {"gaps_open", j.gaps_open}, {"empty", j.empty()}};
  } catch (const Error& e) {
    r.extra["admissible"] = {{"error", e.what()}};
  }
  return r;
}

CommandResult cmd_geometry(const Context& ctx, int threads) {
  const auto es = ctx.energies();
  std::vector<std::string> cols{"E", "item", "label", "index", "sign", "lower", "upper", "status"};
  auto cells = parallel_cells(es.size(), threads, [&](std::size_t i) {
    const double e = es[i];
    return guarded(
        [&] {
          CellOut out;
          const auto report = analyze_window(ctx.model.w, ctx.model.bands, e, ctx.cfg.n, ctx.cfg.m);
          out.info = {{"E", e}, {"window", window_json(report)}};
          if (!report.all_ok()) {
            out.rows.push_back({e, std::string("window"), std::string(""), 0LL, 0LL, report.lower,
                                report.upper, std::string("assumption-failure")});
            out.code = 3;
            return out;
          }
          const auto strip = check_strip(ctx.model, e);
          out.info["strip"] = {{"ok", strip.ok}, {"problems", strip.problems}};
          const auto g = branch_points(ctx.model.w, ctx.model.bands, report);
          const std::string status = strip.ok ? "ok" : "strip-warning";
          for (const auto& bp : g.branch_points)
            out.rows.push_back({e, std::string("branch_point"), fmt::format("E{}{}", bp.index, bp.sign < 0 ? '-' : '+'),
                                static_cast<long long>(bp.index), static_cast<long long>(bp.sign), bp.zeta,
                                bp.zeta, status});
          for (const auto& iv : g.pre_bands)
            out.rows.push_back({e, std::string("pre_band"), iv.label, static_cast<long long>(iv.index),
                                static_cast<long long>(iv.sign), iv.lower, iv.upper, status});
          for (const auto& iv : g.pre_gaps)
            out.rows.push_back({e, std::string("pre_gap"), iv.label, static_cast<long long>(iv.index),
                                static_cast<long long>(iv.sign), iv.lower, iv.upper, status});
          return out;
        },
        Row{e, std::string(""), std::string("")}, cols.size());
  });
  return collect("geometry", cols, std::move(cells));
}

struct ActionsAt {
  ActionSet set;
  std::optional<Error> error;
};

std::vector<ActionsAt> compute_actions(const Context& ctx, const std::vector<double>& es, int threads) {
  std::vector<ActionsAt> out(es.size());
  parallel_cells(es.size(), threads, [&](std::size_t i) {
    try {
      out[i].set = tunneling_actions(ctx.model, ctx.geometry(es[i]), ctx.cfg.tolerances.quadrature);
    } catch (const Error& e) {
      out[i].error = e;
    }
    return CellOut{};
  });
  return out;
}

CommandResult cmd_actions(const Context& ctx, int threads) {
  const auto es = ctx.energies();
  const auto& eps = ctx.cfg.epsilons;
  std::vector<std::string> cols{"E", "gap_label", "S", "quad_error"};
  for (double x : eps) cols.push_back("t_eps_" + eps_tag(x));
  for (double x : eps) cols.push_back("logT_eps_" + eps_tag(x));
  cols.push_back("theta_asym");
  cols.push_back("status");
  const auto actions = compute_actions(ctx, es, threads);
  std::vector<CellOut> cells;
  for (std::size_t i = 0; i < es.size(); ++i) {
    cells.push_back(guarded(
        [&] {
          if (actions[i].error) throw *actions[i].error;
          const auto& set = actions[i].set;
          const auto asym = lyapunov_asymptotic(set, eps.front());
          CellOut out;
          json per_eps = json::object();
          for (double x : eps) per_eps[eps_tag(x)] = total_T(set, x).log_value;
          out.info = {{"E", es[i]}, {"total_action", set.total_action}, {"theta_asym", asym.theta_asym},
                      {"logT", per_eps}};
          for (const auto& entry : set.entries) {
            Row row{es[i], entry.label, entry.action, entry.quadrature_error};
            for (double x : eps) row.emplace_back(tunneling_coefficient(entry.action, x).value);
            for (double x : eps) row.emplace_back(total_T(set, x).log_value);
            row.emplace_back(asym.theta_asym);
            row.emplace_back(std::string("ok"));
            out.rows.push_back(std::move(row));
          }
          return out;
        },
        Row{es[i], std::string("")}, cols.size()));
  }
  return collect("actions", cols, std::move(cells));
}

// Directions around a branch point along which Im of the integral of
// (kappa - pi k) from the branch point vanishes.
std::vector<double> stokes_directions(const Context& ctx, double e, double zeta, double shift, double r) {
  auto phi = [&](double angle) {
    const cplx d = std::polar(r, angle);
    const cplx kappa = complex_momentum(ctx.model, e, zeta + d, ZetaSide::off_axis).value;
    return ((kappa - shift) * d).imag();
  };
  constexpr int grid = 360;
  std::vector<double> out;
  double scale = 0.0;
  std::vector<double> angle(grid + 1), value(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    angle[i] = -pi + two_pi * (i + 0.5) / grid;
    value[i] = phi(angle[i]);
    scale = std::max(scale, std::abs(value[i]));
  }
  for (int i = 0; i < grid; ++i) {
    if ((value[i] > 0) == (value[i + 1] > 0)) continue;
    double a = angle[i], b = angle[i + 1], fa = value[i];
    for (int it = 0; it < 60; ++it) {
      const double c = 0.5 * (a + b);
      const double fc = phi(c);
      if ((fc > 0) == (fa > 0)) {
        a = c;
        fa = fc;
      } else {
        b = c;
      }
    }
    const double root = 0.5 * (a + b);
    // Sign flips across the cut are jumps, not zeros.
    if (std::abs(phi(root)) < 1e-3 * scale) out.push_back(root);
  }
  return out;
}

CommandResult cmd_stokes(const Context& ctx, int threads) {
  const auto es = ctx.energies();
  struct Job {
    double e;
    BranchPoint bp;
    IsoEnergyGeometry g;
  };
  std::vector<Job> jobs;
  std::vector<CellOut> failures;
  for (double e : es) {
    try {
      const auto g = ctx.geometry(e);
      for (const auto& bp : g.branch_points) jobs.push_back({e, bp, g});
    } catch (const Error& err) {
      CellOut c;
      c.rows.push_back({e, std::string(""), 0LL, 0LL, kNaN, kNaN, kNaN, kNaN, std::string(""),
                        std::string(to_string(err.kind()))});
      c.info = {{"E", e}, {"error", err.what()}};
      c.code = exit_code_for(err.kind());
      failures.push_back(std::move(c));
    }
  }
  std::vector<std::string> cols{"E", "branch_point", "line", "point", "zeta_re", "zeta_im",
                                "kappa_re", "kappa_im", "stop", "status"};
  auto cells = parallel_cells(jobs.size(), threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    const std::string label = fmt::format("E{}{}", job.bp.index, job.bp.sign < 0 ? '-' : '+');
    return guarded(
        [&] {
          CellOut out;
          const int k = job.bp.index / 2;  // kappa = pi k at E_j
          const double shift = pi * k;
          const auto family = k % 2 == 0 ? StokesFamily::kappa : StokesFamily::kappa_minus_pi;
          const double even = pi * (k - k % 2);
          constexpr double r = 1e-4;
          const auto dirs = stokes_directions(ctx, job.e, job.bp.zeta, shift, r);
          json lines = json::array();
          for (std::size_t l = 0; l < dirs.size(); ++l) {
            const cplx start = job.bp.zeta + std::polar(r, dirs[l]);
            const cplx kappa = complex_momentum(ctx.model, job.e, start, ZetaSide::off_axis).value;
            const cplx f = kappa - shift;
            const cplx step = std::conj(f) / std::abs(f);
            const int direction = (step * std::conj(start - job.bp.zeta)).real() > 0 ? 1 : -1;
            StokesOptions opt;
            opt.max_length = 3.0;
            const auto line = trace_stokes_line(ctx.model, job.g, start, kappa - even, family, direction, opt);
            static const char* stops[] = {"max_length", "strip_boundary", "branch_point"};
            const std::string stop = stops[static_cast<int>(line.stop)];
            lines.push_back({{"angle", dirs[l]}, {"length", line.length}, {"stop", stop}});
            for (std::size_t p = 0; p < line.points.size(); ++p)
              out.rows.push_back({job.e, label, static_cast<long long>(l), static_cast<long long>(p),
                                  line.points[p].real(), line.points[p].imag(),
                                  (line.momenta[p] + even).real(), line.momenta[p].imag(), stop,
                                  std::string("ok")});
          }
          out.info = {{"E", job.e}, {"branch_point", label}, {"zeta", job.bp.zeta}, {"lines", lines}};
          return out;
        },
        Row{job.e, label, 0LL, 0LL}, cols.size());
  });
  for (auto& f : failures) cells.push_back(std::move(f));
  return collect("stokes", cols, std::move(cells));
}

CommandResult cmd_cocycle(const Context& ctx, int threads) {
  const auto es = ctx.energies();
  const auto& eps = ctx.cfg.epsilons;
  const auto& cs = ctx.cfg.cocycle;
  const auto actions = compute_actions(ctx, es, threads);

  // Unit-modulus model coefficients with seeded phases; the magnitude 1/T
  // enters as the additive constant log(1/T).
  std::mt19937_64 rng(cs.seed);
  std::vector<cplx> unit;
  for (int i = 0; i < 4; ++i) unit.push_back(std::polar(1.0, two_pi * unit_uniform(rng())));
  const auto normalized = model_matrix(unit[0], unit[1], unit[2], unit[3]);

  std::vector<std::string> cols{"E", "epsilon", "h", "L", "logT", "theta_model", "theta_model_se",
                                "Theta_model", "Theta_num", "Theta_num_se", "Theta_asym", "warnings",
                                "status"};
  const std::size_t ne = eps.size();
  auto cells = parallel_cells(es.size() * ne, threads, [&](std::size_t i) {
    const double e = es[i / ne], x = eps[i % ne];
    return guarded(
        [&] {
          const auto& a = actions[i / ne];
          if (a.error) throw *a.error;
          const double log_t = total_T(a.set, x).log_value;
          const double theta_asym = lyapunov_asymptotic(a.set, x).theta_asym;
          const double h = h_from_epsilon(x);
          CocycleSpec spec{normalized, h, cs.z, cs.iterations, 8, cs.z_samples, x};
          const auto model = cocycle_lyapunov(spec);
          const double theta_model = -log_t + model.value;
          const double length = cs.periods * two_pi / x;
          const auto direct = direct_lyapunov(ctx.model.v, ctx.model.w, x, e, cs.z, length,
                                              ctx.cfg.tolerances.ode);
          std::string warnings;
          for (const auto& w : model.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
          for (const auto& w : direct.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
          CellOut out;
          out.rows.push_back({e, x, h, length, log_t, theta_model, model.standard_error,
                              theta_to_Theta(theta_model, x), direct.value, direct.standard_error,
                              theta_asym, warnings, std::string("ok")});
          out.info = {{"E", e}, {"epsilon", x}, {"model_block_count", model.block_log_norms.size()}};
          return out;
        },
        Row{e, x}, cols.size());
  });
  auto r = collect("cocycle", cols, std::move(cells));
  r.extra["model_phases"] = json::array();
  for (const auto& u : unit) r.extra["model_phases"].push_back(std::arg(u));
  return r;
}

CommandResult cmd_verify(const Context& ctx, int threads) {
  const auto es = ctx.energies();
  const auto& eps = ctx.cfg.epsilons;
  const auto& cs = ctx.cfg.cocycle;
  const auto actions = compute_actions(ctx, es, threads);
  std::vector<std::string> cols{"E", "epsilon", "L", "Theta_num", "Theta_num_se", "Theta_asym",
                                "relative_error", "status"};
  const std::size_t ne = eps.size();
  auto cells = parallel_cells(es.size() * ne, threads, [&](std::size_t i) {
    const double e = es[i / ne], x = eps[i % ne];
    return guarded(
        [&] {
          const auto& a = actions[i / ne];
          if (a.error) throw *a.error;
          const double asym = lyapunov_asymptotic(a.set, x).theta_asym;
          const double length = cs.periods * two_pi / x;
          const auto d = direct_lyapunov(ctx.model.v, ctx.model.w, x, e, cs.z, length, ctx.cfg.tolerances.ode);
          CellOut out;
          out.rows.push_back({e, x, length, d.value, d.standard_error, asym,
                              std::abs(d.value - asym) / asym, std::string("ok")});
          return out;
        },
        Row{e, x}, cols.size());
  });

  // Checks per energy, in the order the epsilons were listed.
  json verdicts = json::array();
  bool all_pass = true, conclusive = ne >= 2;
  int code = 0;
  for (std::size_t k = 0; k < es.size(); ++k) {
    bool positive = true, monotone = true, ok = true;
    double last = kNaN;
    for (std::size_t j = 0; j < ne; ++j) {
      const auto& c = cells[k * ne + j];
      code = std::max(code, c.code);
      if (c.code != 0) {
        ok = false;
        continue;
      }
      const auto& row = c.rows.front();
      const double theta = std::get<double>(row[3]), rel = std::get<double>(row[6]);
      positive = positive && theta > 0.0;
      if (j > 0 && !(rel <= last)) monotone = false;
      last = rel;
    }
    const bool final_ok = ok && last <= ctx.cfg.max_relative_error;
    const bool pass = ok && positive && monotone && final_ok;
    all_pass = all_pass && pass;
    verdicts.push_back({{"E", es[k]}, {"positive", positive}, {"monotone", monotone},
                        {"final_relative_error", last}, {"final_within_bound", final_ok}, {"pass", pass}});
  }
  auto r = collect("verify", cols, std::move(cells));
  r.extra["checks"] = verdicts;
  r.extra["max_relative_error"] = ctx.cfg.max_relative_error;
  const std::string verdict = !all_pass ? "FAIL" : conclusive ? "PASS" : "INCONCLUSIVE";
  r.extra["verdict"] = verdict;
  r.exit_code = code != 0 ? code : verdict == "FAIL" ? 4 : 0;
  return r;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return 2;
    case ErrorKind::assumption_failure: return 3;
    default: return 4;
  }
}

CommandResult run_command(const std::string& name, const RunConfig& config, int threads) {
  require(threads >= 1, ErrorKind::invalid_input, "--threads must be >= 1");
  const Context ctx(config);
  if (name == "bands") return cmd_bands(ctx);
  if (name == "geometry") return cmd_geometry(ctx, threads);
  if (name == "actions") return cmd_actions(ctx, threads);
  if (name == "stokes") return cmd_stokes(ctx, threads);
  if (name == "cocycle") return cmd_cocycle(ctx, threads);
  if (name == "verify") return cmd_verify(ctx, threads);
  fail(ErrorKind::invalid_input, "unknown subcommand " + name);
}

}  // namespace adiaspec::cli
