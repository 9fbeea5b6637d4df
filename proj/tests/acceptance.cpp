// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "adiaspec/actions.hpp"
#include "adiaspec/cli.hpp"
#include "adiaspec/cocycle.hpp"
#include "adiaspec/geometry.hpp"
#include "adiaspec/hill.hpp"
#include "oracles/kronig_penney_oracle.hpp"
#include "oracles/rk4_oracle.hpp"
#include "reference_data.hpp"

using namespace adiaspec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

AdiabaticModel reference_model() {
  const auto config = cli::load_config(ADIASPEC_SOURCE_DIR "/configs/reference.yaml");
  const auto v = config.fast_potential();
  return {v, AnalyticPotential(config.w_terms, config.strip_half_width), band_edges(v, 45.0)};
}

std::vector<double> grid_in_window(const AdiabaticModel& model, int count) {
  const auto j = admissible_interval(model.w, model.bands, 1, 0);
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(j.lower + (j.upper - j.lower) * i / (count + 1.0));
  return out;
}

IsoEnergyGeometry geometry_at(const AdiabaticModel& model, double e) {
  return branch_points(model.w, model.bands, analyze_window(model.w, model.bands, e, 1, 0));
}

// 1. Theta_num from the full operator approaches Theta_asym.
Outcome end_to_end() {
  Outcome out;
  const auto model = reference_model();
  const double e = admissible_interval(model.w, model.bands, 1, 0).maximizer;
  const auto set = tunneling_actions(model, geometry_at(model, e));
  const double asym = lyapunov_asymptotic(set, 0.1).theta_asym;
  double last = INFINITY;
  std::string trail;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto d = direct_lyapunov(model.v, model.w, eps, e, 0.0, 200.0 * two_pi / eps, 1e-12);
    const double rel = std::abs(d.value - asym) / asym;
    out.expect(d.value > 0.0, fmt::format("Theta_num <= 0 at eps {}", eps));
    out.expect(rel <= last, fmt::format("relative error grew at eps {}", eps));
    last = rel;
    trail += fmt::format(" {:.4f}", rel);
  }
  out.expect(last <= 0.2, "final relative error above 20%");
  out.detail = fmt::format("Theta_asym {:.6f}, relative errors{}{}", asym, trail,
                           out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 2. Discriminant against the fixed-step oracle; Kronig-Penney edges.
Outcome floquet_oracle() {
  Outcome out;
  const std::vector<PeriodicPotential> potentials{
      PeriodicPotential::trig_sum({{1, 2.0, 0.0}}),
      PeriodicPotential::trig_sum({{1, 3.0, 0.0}, {2, 0.0, 1.5}}),
      PeriodicPotential::piecewise_constant({{0.0, 5.0}, {0.5, 0.0}}),
  };
  double worst = 0.0;
  for (const auto& v : potentials) {
    auto vf = [&](double x) { return v(x); };
    for (int i = 0; i < 50; ++i) {
      const double e = -4.0 + i * 1.3;
      const double d = discriminant(v, e).real();
      const double ref = oracle::rk4_discriminant(vf, e, 20000).real();
      worst = std::max(worst, std::abs(d - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  out.expect(worst <= 1e-9, fmt::format("discriminant mismatch {:.2e}", worst));
  const auto bands = band_edges(potentials[2], 60.0);
  const auto ref = oracle::kp_edges(5.0, 0.5, 60.0);
  double edge_worst = 0.0;
  out.expect(bands.edges.size() == ref.size(), "Kronig-Penney edge count");
  for (std::size_t j = 0; j < std::min(ref.size(), bands.edges.size()); ++j)
    edge_worst = std::max(edge_worst, std::abs(bands.edges[j] - ref[j]));
  out.expect(edge_worst <= 1e-8, fmt::format("edge mismatch {:.2e}", edge_worst));
  out.detail = fmt::format("max discriminant deviation {:.2e}, max edge deviation {:.2e}{}", worst,
                           edge_worst, out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 3. Monotone in bands, constant real part and one maximum in gaps, square-root edges.
Outcome quasimomentum_properties() {
  Outcome out;
  const auto model = reference_model();
  const auto& v = model.v;
  const auto& b = model.bands;
  for (int n = 1; n <= 2; ++n) {
    const auto [lo, hi] = b.band(n);
    double prev = -1.0;
    for (int i = 1; i <= 100; ++i) {
      const double k = quasimomentum_main(v, b, lo + (hi - lo) * i / 101.0).value.real();
      out.expect(k > prev && k >= pi * (n - 1) && k <= pi * n, fmt::format("band {} not monotone", n));
      prev = k;
    }
  }
  for (int n = 1; n <= 2; ++n) {
    const double lo = b.edge(2 * n), hi = b.edge(2 * n + 1);
    std::vector<double> im;
    for (int i = 1; i < 60; ++i) {
      const auto k = quasimomentum_main(v, b, lo + (hi - lo) * i / 60.0).value;
      out.expect(std::abs(k.real() - pi * n) < 1e-12, fmt::format("gap {} real part varies", n));
      im.push_back(k.imag());
    }
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < im.size(); ++i) peaks += im[i] > im[i - 1] && im[i] > im[i + 1];
    out.expect(peaks == 1 && im.front() < im[im.size() / 2] && im.back() < im[im.size() / 2],
               fmt::format("gap {} has {} interior maxima", n, peaks));
  }
  double worst = 0.0;
  for (int j = 1; j <= 5; ++j) {
    const double dir = (j % 2 == 1) ? 1.0 : -1.0;
    const double kj = pi * (j / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int p = 3; p <= 7; ++p) {
      const double de = std::pow(10.0, -p);
      const double x = std::log(de);
      const double y = std::log(std::abs(quasimomentum_main(v, b, b.edge(j) + dir * de).value - kj));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (5 * sxy - sx * sy) / (5 * sxx - sx * sx);
    worst = std::max(worst, std::abs(slope - 0.5));
  }
  out.expect(worst <= 0.05, fmt::format("edge exponent off by {:.3f}", worst));
  out.detail = fmt::format("max edge exponent deviation {:.2e}{}", worst,
                           out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 4. Interlacing, tiling and real branch properties on 20 energies in J.
Outcome geometry_invariants() {
  Outcome out;
  const auto model = reference_model();
  int branches = 0;
  for (double e : grid_in_window(model, 20)) {
    const auto g = geometry_at(model, e);
    double prev = 0.0;
    bool after_star = false;
    for (const auto& p : g.branch_points) {
      out.expect(p.zeta > prev, "branch points out of order");
      after_star = after_star || p.zeta > g.zeta_star;
      out.expect((p.sign < 0) == !after_star, "branch point on the wrong side of zeta*");
      out.expect(std::abs(model.w(p.zeta) - (e - model.bands.edge(p.index))) < 1e-10,
                 "branch point off its level");
      prev = p.zeta;
    }
    out.expect(g.zeta(1, -1) < g.zeta(2, -1) && g.zeta(2, -1) < g.zeta_star &&
                   g.zeta_star < g.zeta(2, 1) && g.zeta(2, 1) < g.zeta(1, 1),
               "interlacing");
    auto all = g.pre_bands;
    all.insert(all.end(), g.pre_gaps.begin(), g.pre_gaps.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& c) { return a.lower < c.lower; });
    out.expect(std::abs(all.back().upper - all.front().lower - two_pi) < 1e-12, "tiling length");
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
      out.expect(all[i].upper == all[i + 1].lower && all[i].lower < all[i].upper, "tiling gap");

    for (const auto& z : g.pre_bands) {
      ++branches;
      const RealBranch br(model, g, z.label);
      const double first = z.sign < 0 ? z.lower : z.upper;
      const double second = z.sign < 0 ? z.upper : z.lower;
      out.expect(br.evaluate(0.0) == first && br.evaluate(pi) == second, "branch endpoints");
      const auto zs = br.zeta_nodes();
      for (std::size_t i = 1; i < zs.size(); ++i)
        out.expect(z.sign < 0 ? zs[i] > zs[i - 1] : zs[i] < zs[i - 1], "branch not monotone");
      for (int i = 0; i < 12; ++i) {
        const double k = -7.0 + 1.3 * i;
        out.expect(br.evaluate(-k) == br.evaluate(k), "branch not even");
        out.expect(std::abs(br.evaluate(k + two_pi) - br.evaluate(k)) < 1e-12, "branch not periodic");
      }
      for (int i = 1; i < 10; ++i) {
        const double k = pi * i / 10.0;
        out.expect(std::abs(br.reduced_momentum(br.evaluate(k)) - k) < 1e-8, "branch does not invert");
      }
    }
  }
  out.detail = fmt::format("20 energies, {} real branches{}", branches,
                           out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 5. Positivity, both-sides agreement, identity of the two asymptotic forms.
Outcome action_properties() {
  Outcome out;
  const auto model = reference_model();
  double side_worst = 0.0, identity_worst = 0.0, smallest = INFINITY;
  for (double e : grid_in_window(model, 20)) {
    const auto g = geometry_at(model, e);
    const auto set = tunneling_actions(model, g);
    for (const auto& entry : set.entries) {
      smallest = std::min(smallest, entry.action);
      const double lower = tunneling_action(model, g, entry.label, Side::lower).value;
      side_worst = std::max(side_worst, std::abs(lower - entry.action) / entry.action);
    }
    for (double eps : {0.2, 0.05, 1e-3}) {
      const auto a = lyapunov_asymptotic(set, eps);
      identity_worst = std::max(identity_worst,
                                std::abs(a.theta_from_coefficients - a.theta_asym) / a.theta_asym);
    }
  }
  out.expect(smallest > 0.0, "non-positive action");
  out.expect(side_worst <= 1e-8, "sides disagree");
  out.expect(identity_worst <= 1e-14, "asymptotic forms disagree");
  out.detail = fmt::format("min S {:.4f}, side deviation {:.2e}, identity deviation {:.2e}{}", smallest,
                           side_worst, identity_worst, out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 6. Period index of the two crossing sequences and the signature rule.
Outcome period_indices() {
  Outcome out;
  for (int m = 0; m <= 3; ++m) {
    const std::vector<double> odd_first{0.0, pi, pi * (1 - m)};
    const auto a = period_index(odd_first);
    out.expect(a.signature == -1 && a.index == -m, fmt::format("first sequence, m = {}", m));
    const std::vector<double> odd_second{0.4, 0.4, pi * (m + 1)};
    const auto b = period_index(odd_second);
    out.expect(b.signature == -1 && b.index == m + 1, fmt::format("second sequence, m = {}", m));
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> r(rng() % 9);
    for (auto& x : r) x = u(rng);
    out.expect(period_index(r).signature == (r.size() % 2 ? -1 : 1), "signature");
  }
  out.detail = "m = 0..3 and 200 random lists" + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 7. Cocycle suite.
Outcome cocycle_suite() {
  Outcome out;
  auto spec = [](MatrixFamily f, long n = 10000) {
    return CocycleSpec{std::move(f), h_from_epsilon(0.1), 0.0, n, 8, 8, 0.1};
  };
  Mat2c d;
  d << 2.0, 0.0, 0.0, 0.5;
  const MatrixFamily diag(FamilyKind::other, [d](double) { return d; });
  out.expect(std::abs(cocycle_lyapunov(spec(diag)).value - std::log(2.0)) < 1e-10, "diagonal");

  const MatrixFamily rot(FamilyKind::other, [](double z) {
    Mat2c m;
    m << std::cos(two_pi * z), -std::sin(two_pi * z), std::sin(two_pi * z), std::cos(two_pi * z);
    return m;
  });
  const auto r = cocycle_lyapunov(spec(rot));
  out.expect(std::abs(r.value) <= 3.0 * r.standard_error, "rotation");

  HermanParameters base;
  base.lambda = cplx(0.0, 3.0);
  out.expect(std::abs(cocycle_lyapunov(spec(herman_family(base))).value - std::log(3.0)) < 1e-8,
             "Herman base case");

  int herman_runs = 0;
  for (double m : {0.01, 0.05, 0.1}) {
    for (std::uint64_t seed = 11; seed <= 20; ++seed) {
      HermanParameters p;
      p.m_amp = m;
      p.seed = seed;
      ++herman_runs;
      out.expect(herman_bound_check(p, reference::kHermanC, 10000, 4).holds,
                 fmt::format("Herman bound, m {} seed {}", m, seed));
    }
  }

  const double log_inv_t = 3.0;
  const double mag = std::exp(log_inv_t);
  const auto model = model_matrix(mag, mag * cplx(0.0, 1.0), mag * std::polar(1.0, 0.7),
                                  mag * std::polar(1.0, -1.3));
  for (auto variant : {Conjugation::swap_sigma, Conjugation::s_twist}) {
    const auto c = conjugation_invariance_check(spec(model), variant);
    out.expect(c.difference <= 3.0 * c.combined_standard_error, "conjugation invariance");
  }
  const double theta = cocycle_lyapunov(spec(model, 20000)).value;
  out.expect(std::abs(theta - log_inv_t) <= reference::kModelWindow, "model exponent window");
  out.detail = fmt::format("{} Herman runs with C = {}, theta(M0) - log(1/T) = {:.3f}{}", herman_runs,
                           reference::kHermanC, theta - log_inv_t,
                           out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 8. Byte-identical CLI outputs across reruns and thread counts.
Outcome determinism() {
  Outcome out;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "adiaspec_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "sweep.yaml";
  std::ofstream(config) << "v: {terms: [{frequency: 1, cos: 2.0}]}\n"
                           "w: {terms: [{frequency: 1, cos: 6.5}], strip_half_width: 0.5}\n"
                           "energies: {mode: window, count: 4}\n"
                           "epsilons: [0.2, 0.1]\n"
                           "cocycle: {periods: 40, iterations: 2000, seed: 17}\n";
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int compared = 0;
  for (const std::string cmd : {"bands", "geometry", "actions", "stokes", "cocycle", "verify"}) {
    std::vector<std::string> texts;
    for (const auto& [tag, threads] : {std::pair{"a", 1}, {"b", 1}, {"c", 4}}) {
      const fs::path dir = root / tag;
      const std::string line = fmt::format("\"{}\" {} --config \"{}\" --out \"{}\" --threads {} --seed 17",
                                           ADIASPEC_TOOL, cmd, config.string(), dir.string(), threads);
      const int status = std::system(line.c_str());
      out.expect(status == 0, cmd + " exited with an error");
      texts.push_back(slurp(dir / (cmd + ".csv")) + slurp(dir / (cmd + ".json")));
    }
    out.expect(!texts[0].empty(), cmd + " wrote nothing");
    out.expect(texts[0] == texts[1], cmd + " differs between reruns");
    out.expect(texts[0] == texts[2], cmd + " differs with --threads 4");
    ++compared;
  }
  out.detail = fmt::format("{} subcommands, 3 runs each{}", compared,
                           out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"end-to-end asymptotics", end_to_end},
      {"Floquet oracle equivalence", floquet_oracle},
      {"quasi-momentum properties", quasimomentum_properties},
      {"geometry invariants", geometry_invariants},
      {"action properties", action_properties},
      {"period-index vectors", period_indices},
      {"cocycle suite", cocycle_suite},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("ACCEPTANCE %zu %s  %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
