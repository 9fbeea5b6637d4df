#include "adiaspec/hill.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adiaspec/error.hpp"
#include "adiaspec/numerics.hpp"
#include "adiaspec/propagator.hpp"

namespace adiaspec {

namespace {

// sin(w)/w with a short series near zero.
cplx sinc(cplx w) {
  if (std::abs(w) < 1e-4) {
    const cplx w2 = w * w;
    return 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
  }
  return std::sin(w) / w;
}

// Exact propagator across a segment of length d where V is constant.
Mat2c constant_segment(cplx energy, double value, double d) {
  const cplx s = std::sqrt(energy - value);
  const cplx sd = s * d;
  const cplx c = std::cos(sd);
  const cplx sn = sinc(sd);
  Mat2c m;
  m << c, d * sn, -(energy - value) * d * sn, c;
  return m;
}

Mat2c piecewise_matrix(const PeriodicPotential& v, cplx energy, double x0, double x1) {
  std::vector<double> cuts = v.discontinuities(x0, x1);
  cuts.insert(cuts.begin(), x0);
  cuts.push_back(x1);
  Mat2c m = Mat2c::Identity();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    m = constant_segment(energy, v(0.5 * (a + b)), b - a) * m;
  }
  return m;
}

int edge_sign(int j) { return (j / 2) % 2 == 0 ? 1 : -1; }

// Value of k_p at edge E_j.
double edge_momentum(int j) { return pi * (j / 2); }

cplx principal_band_value(int n, double delta) {
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  const double arg = std::clamp(sign * delta / 2.0, -1.0, 1.0);
  return {pi * (n - 1) + std::acos(arg), 0.0};
}

}  // namespace

FundamentalMatrix fundamental_matrix(const PeriodicPotential& v, cplx energy, double x0, double x1,
                                     double tol) {
  require(is_finite(energy), ErrorKind::invalid_input, "energy must be finite");
  require(std::isfinite(x0) && std::isfinite(x1), ErrorKind::invalid_input,
          "interval end points must be finite");
  require(tol > 0.0, ErrorKind::invalid_input, "tolerance must be positive");
  require(x1 > x0, ErrorKind::invalid_input, "fundamental_matrix needs x1 > x0");

  FundamentalMatrix out;
  out.x0 = x0;
  out.x1 = x1;
  out.energy = energy;
  if (v.kind() == PeriodicPotential::Kind::piecewise_constant) {
    out.entries = piecewise_matrix(v, energy, x0, x1);
    out.tolerance_achieved = 0.0;
  } else if (energy.imag() == 0.0) {
    const double e = energy.real();
    StepHint hint;
    const auto prop = propagate<double>([&](double x) { return v(x) - e; }, x0, x1, tol, hint);
    out.entries = prop.matrix.cast<cplx>();
    out.tolerance_achieved = prop.error;
  } else {
    StepHint hint;
    const auto prop =
        propagate<cplx>([&](double x) { return cplx(v(x)) - energy; }, x0, x1, tol, hint);
    out.entries = prop.matrix;
    out.tolerance_achieved = prop.error;
  }
  require(out.entries.allFinite(), ErrorKind::convergence_failure,
          "fundamental matrix overflowed");
  return out;
}

cplx discriminant(const PeriodicPotential& v, cplx energy, double tol) {
  return fundamental_matrix(v, energy, 0.0, 1.0, tol).entries.trace();
}

double discriminant_derivative(const PeriodicPotential& v, double energy, double tol) {
  constexpr double h = 1e-20;
  return discriminant(v, cplx(energy, h), tol).imag() / h;
}

// ---------------------------------------------------------------------------
// BandStructure

std::pair<double, double> BandStructure::band(int n) const {
  require(n >= 1 && has_edge(2 * n - 1), ErrorKind::coverage,
          "band " + std::to_string(n) + " lies above the energy ceiling");
  const double lo = edge(2 * n - 1);
  const double hi = has_edge(2 * n) ? edge(2 * n) : energy_ceiling;
  return {lo, hi};
}

bool BandStructure::gap_is_open(int n) const {
  if (n == 0) return true;
  const auto k = static_cast<std::size_t>(n - 1);
  require(n >= 1 && k < gap_open.size(), ErrorKind::coverage,
          "gap " + std::to_string(n) + " lies above the energy ceiling");
  return gap_open[k];
}

SpectralLocation BandStructure::locate(double energy) const {
  using K = SpectralLocation::Kind;
  if (edges.empty() || energy < edges.front()) {
    if (edges.empty() && energy >= energy_ceiling) return {K::above_ceiling, 0};
    return {K::below_spectrum, 0};
  }
  if (energy > energy_ceiling) return {K::above_ceiling, 0};
  const int count = static_cast<int>(edges.size());
  for (int n = 1; 2 * n - 1 <= count; ++n) {
    const double lo = edge(2 * n - 1);
    const double hi = has_edge(2 * n) ? edge(2 * n) : energy_ceiling;
    if (energy >= lo && energy <= hi) return {K::band, n};
    if (!has_edge(2 * n + 1)) {
      if (has_edge(2 * n) && energy > hi) return {K::gap, n};
      break;
    }
    if (energy > hi && energy < edge(2 * n + 1)) return {K::gap, n};
  }
  return {K::above_ceiling, 0};
}

std::vector<std::pair<double, double>> BandStructure::band_intervals() const {
  std::vector<std::pair<double, double>> out;
  for (int n = 1; has_edge(2 * n - 1); ++n) out.push_back(band(n));
  return out;
}

// ---------------------------------------------------------------------------
// Band edges

BandStructure band_edges(const PeriodicPotential& v, double energy_ceiling, double tol) {
  BandSearchOptions options;
  options.edge_tolerance = tol;
  return band_edges(v, energy_ceiling, options);
}

BandStructure band_edges(const PeriodicPotential& v, double energy_ceiling,
                         const BandSearchOptions& options) {
  require(std::isfinite(energy_ceiling), ErrorKind::invalid_input,
          "energy ceiling must be finite");
  require(options.edge_tolerance > 0.0 && options.ode_tolerance > 0.0, ErrorKind::invalid_input,
          "tolerances must be positive");
  require(options.points_per_spacing >= 4, ErrorKind::invalid_input,
          "at least four scan points per band spacing are required");

  BandStructure out;
  out.energy_ceiling = energy_ceiling;
  out.edge_tolerance = options.edge_tolerance;

  const double vmin = v.lower_bound();
  const double start = vmin - 1.0;
  if (energy_ceiling <= start) return out;

  const double otol = options.ode_tolerance;
  auto delta = [&](double e) { return discriminant(v, cplx(e), otol).real(); };
  auto slope = [&](double e) { return discriminant_derivative(v, e, otol); };

  // Scan grid, refined with the local Weyl spacing.
  struct Sample {
    double e, d, dd;
  };
  std::vector<Sample> grid;
  for (double e = start;;) {
    const cplx z = discriminant(v, cplx(e, 1e-20), otol);
    grid.push_back({e, z.real(), z.imag() / 1e-20});
    if (e >= energy_ceiling) break;
    const double n = std::sqrt(std::max(0.0, e - vmin)) / pi;
    const double step = pi * pi * std::max(1.0, 2.0 * n + 1.0) / options.points_per_spacing;
    e = std::min(e + step, energy_ceiling);
  }

  // Critical points of Delta split the axis into monotone pieces.
  std::vector<double> knots{start};
  std::vector<double> knot_values{grid.front().d};
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const auto& a = grid[i];
    const auto& b = grid[i + 1];
    if (i > 0 && a.dd == 0.0) {
      knots.push_back(a.e);
      knot_values.push_back(a.d);
      continue;
    }
    if ((a.dd < 0) != (b.dd < 0) && b.dd != 0.0) {
      const double c = bisect(slope, a.e, b.e, a.dd, b.dd, 1e-13 * std::max(1.0, std::abs(a.e)));
      knots.push_back(c);
      knot_values.push_back(delta(c));
    }
  }
  knots.push_back(energy_ceiling);
  knot_values.push_back(grid.back().d);

  // Double roots within this band of +-2 are closed gaps.
  const double noise = std::max(1e-9, 1e3 * otol);
  std::vector<double> found;
  for (std::size_t k = 1; k + 1 < knots.size(); ++k) {
    if (std::abs(std::abs(knot_values[k]) - 2.0) <= noise) {
      found.push_back(knots[k]);
      found.push_back(knots[k]);
    }
  }
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    for (double target : {2.0, -2.0}) {
      const double fa = knot_values[k] - target;
      const double fb = knot_values[k + 1] - target;
      // Pieces ending in a double root already contributed that root.
      const bool touch_a = k > 0 && std::abs(fa) <= noise;
      const bool touch_b = k + 2 < knots.size() && std::abs(fb) <= noise;
      if (touch_a || touch_b) continue;
      if ((fa < 0) == (fb < 0)) continue;
      const double root = bisect(
          [&](double e) { return delta(e) - target; }, a, b, fa, fb, options.edge_tolerance * 0.1);
      found.push_back(root);
    }
  }

  std::vector<std::size_t> order(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return found[a] < found[b]; });
  for (std::size_t i : order) out.edges.push_back(found[i]);

  // Pattern check: +2, -2, -2, +2, +2, ...
  for (std::size_t i = 0; i < out.edges.size(); ++i) {
    const int j = static_cast<int>(i) + 1;
    const double d = delta(out.edges[i]);
    const bool ok = std::abs(d - 2.0 * edge_sign(j)) <= std::max(noise, 1e-6);
    if (!ok)
      fail(ErrorKind::resolution_failure,
           "band edge pattern broken at E_" + std::to_string(j) + " = " +
               std::to_string(out.edges[i]) + "; refine the scan grid");
  }
  for (std::size_t k = 0; 2 * k + 2 < out.edges.size(); ++k)
    out.gap_open.push_back(out.edges[2 * k + 2] - out.edges[2 * k + 1] > options.edge_tolerance);
  for (std::size_t k = 0; k < out.gap_open.size(); ++k) {
    if (!out.gap_open[k]) {
      const double mid = 0.5 * (out.edges[2 * k + 1] + out.edges[2 * k + 2]);
      out.edges[2 * k + 1] = mid;
      out.edges[2 * k + 2] = mid;
    }
  }

  // Every complete band must contain at least two scan points.
  for (std::size_t i = 0; i + 1 < out.edges.size(); i += 2) {
    const double lo = out.edges[i];
    const double hi = out.edges[i + 1];
    const auto inside = std::count_if(grid.begin(), grid.end(),
                                      [&](const Sample& s) { return s.e >= lo && s.e <= hi; });
    if (inside < 2)
      fail(ErrorKind::resolution_failure,
           "band [" + std::to_string(lo) + ", " + std::to_string(hi) +
               "] is narrower than the scan grid; refine the scan grid");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-momentum

namespace {

cplx real_axis_value(const PeriodicPotential& v, const BandStructure& bands, double e, Side side,
                     double ode_tol, bool& degenerate) {
  using K = SpectralLocation::Kind;
  degenerate = false;
  for (int j = 1; bands.has_edge(j); ++j) {
    if (std::abs(e - bands.edge(j)) <= bands.edge_tolerance) {
      degenerate = true;
      return {edge_momentum(j), 0.0};
    }
  }
  const auto where = bands.locate(e);
  require(where.kind != K::above_ceiling, ErrorKind::invalid_input,
          "energy lies above the band-structure ceiling");
  const double s = side == Side::upper ? 1.0 : -1.0;
  const double d = discriminant(v, cplx(e), ode_tol).real();
  switch (where.kind) {
    case K::below_spectrum:
      return {0.0, s * std::acosh(std::max(1.0, d / 2.0))};
    case K::band:
      return principal_band_value(where.index, d);
    case K::gap:
      return {pi * where.index, s * std::acosh(std::max(1.0, std::abs(d) / 2.0))};
    case K::above_ceiling:
      break;
  }
  return {};
}

}  // namespace

cplx nearest_quasimomentum_root(cplx delta, cplx previous, double* separation) {
  const cplx w = std::acos(delta / 2.0);
  cplx best{};
  double d1 = INFINITY;
  double d2 = INFINITY;
  for (cplx base : {w, -w}) {
    const double l0 = std::round((previous.real() - base.real()) / two_pi);
    for (double dl : {-1.0, 0.0, 1.0}) {
      const cplx cand = base + two_pi * (l0 + dl);
      const double dist = std::abs(cand - previous);
      if (dist < d1) {
        d2 = d1;
        d1 = dist;
        best = cand;
      } else if (dist < d2) {
        d2 = dist;
      }
    }
  }
  if (separation) *separation = d2;
  return best;
}

cplx continue_quasimomentum(const PeriodicPotential& v, const BandStructure& bands, cplx from,
                            cplx k_from, cplx to, double ode_tol) {
  require(is_finite(from) && is_finite(to) && is_finite(k_from), ErrorKind::invalid_input,
          "continuation end points must be finite");
  if (from.imag() * to.imag() < 0.0) {
    const double t = from.imag() / (from.imag() - to.imag());
    const double x = from.real() + t * (to.real() - from.real());
    const auto where = bands.locate(x);
    if (where.kind != SpectralLocation::Kind::band)
      fail(ErrorKind::cut_crossing,
           "continuation path crosses the real axis outside the spectrum at E = " +
               std::to_string(x) + "; choose the +i0 or -i0 side explicitly");
  }
  const cplx path = to - from;
  if (std::abs(path) == 0.0) return k_from;

  double t = 0.0;
  double dt = 1.0 / 16.0;
  cplx k = k_from;
  cplx d_prev = discriminant(v, from, ode_tol);
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    const cplx d = discriminant(v, from + t_next * path, ode_tol);
    double runner_up = 0.0;
    const cplx cand = nearest_quasimomentum_root(d, k, &runner_up);
    const double dist = std::abs(cand - k);
    const bool smooth = std::abs(d - d_prev) < 0.5;
    const bool unambiguous = dist < 0.25 * runner_up;
    if (smooth && unambiguous) {
      k = cand;
      d_prev = d;
      t = t_next;
      dt = std::min(2.0 * dt, 0.25);
      continue;
    }
    dt *= 0.5;
    if (dt < 1e-12)
      fail(ErrorKind::degenerate_point,
           "continuation path passes through a branch point of the quasi-momentum");
  }
  return k;
}

QuasiMomentumValue quasimomentum_main(const PeriodicPotential& v, const BandStructure& bands,
                                      cplx energy, Side side, double ode_tol) {
  require(is_finite(energy), ErrorKind::invalid_input, "energy must be finite");
  QuasiMomentumValue out;
  out.energy = energy;
  if (energy.imag() == 0.0) {
    bool degenerate = false;
    out.value = real_axis_value(v, bands, energy.real(), side, ode_tol, degenerate);
    out.degenerate = degenerate;
    return out;
  }
  if (energy.imag() < 0.0) {
    auto mirrored = quasimomentum_main(v, bands, std::conj(energy), Side::upper, ode_tol);
    mirrored.value = std::conj(mirrored.value);
    mirrored.energy = energy;
    return mirrored;
  }

  // Real anchor below E, kept away from the band edges.
  double anchor = energy.real();
  const double margin = std::max(1e-3, 0.25 * energy.imag());
  require(anchor < bands.energy_ceiling, ErrorKind::invalid_input,
          "energy lies above the band-structure ceiling");
  for (int j = 1; bands.has_edge(j); ++j) {
    const double ej = bands.edge(j);
    if (std::abs(anchor - ej) >= margin) continue;
    // Room on the side of the edge where the anchor already sits.
    const bool above = anchor >= ej;
    double room = margin;
    if (above && bands.has_edge(j + 1)) room = std::min(room, 0.5 * (bands.edge(j + 1) - ej));
    if (!above && j > 1) room = std::min(room, 0.5 * (ej - bands.edge(j - 1)));
    if (room <= 0.0) room = margin;
    anchor = above ? ej + room : ej - room;
    break;
  }
  bool degenerate = false;
  const cplx k0 = real_axis_value(v, bands, anchor, Side::upper, ode_tol, degenerate);
  out.value = continue_quasimomentum(v, bands, cplx(anchor, 0.0), k0, energy, ode_tol);
  return out;
}

double band_energy(const PeriodicPotential& v, const BandStructure& bands, int n, double k,
                   double ode_tol) {
  require(n >= 1, ErrorKind::invalid_input, "band index must be positive");
  require(k >= pi * (n - 1) && k <= pi * n, ErrorKind::invalid_input,
          "quasi-momentum outside the band's range");
  require(bands.has_edge(2 * n), ErrorKind::coverage,
          "band " + std::to_string(n) + " is not complete below the ceiling");
  const double lo = bands.edge(2 * n - 1);
  const double hi = bands.edge(2 * n);
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  const double c = std::cos(k - pi * (n - 1));
  auto g = [&](double e) { return sign * discriminant(v, cplx(e), ode_tol).real() / 2.0 - c; };
  if (lo == hi) return lo;
  return bisect(g, lo, hi, 1.0 - c, -1.0 - c, 1e-14 * std::max(1.0, std::abs(hi)));
}

BlochFloquet bloch_floquet(const PeriodicPotential& v, cplx energy, double ode_tol,
                           double degeneracy_tol) {
  const Mat2c m = fundamental_matrix(v, energy, 0.0, 1.0, ode_tol).entries;
  const cplx tr = m.trace();
  const cplx det = m.determinant();
  const cplx root = std::sqrt(tr * tr - 4.0 * det);
  cplx big = 0.5 * (tr + root);
  cplx other = 0.5 * (tr - root);
  if (std::abs(other) > std::abs(big)) std::swap(big, other);
  other = det / big;
  if (std::abs(big - other) < degeneracy_tol)
    fail(ErrorKind::degenerate_point, "Floquet multipliers coincide (band edge)");
  if (std::abs(std::abs(big) - std::abs(other)) <= 1e-12 * std::abs(big) &&
      big.imag() < other.imag())
    std::swap(big, other);

  Vec2c a(m(0, 1), big - m(0, 0));
  Vec2c b(big - m(1, 1), m(1, 0));
  Vec2c dir = a.norm() >= b.norm() ? a : b;
  if (std::abs(dir(0)) > 1e-14 * dir.norm())
    dir /= dir(0);
  else
    dir.normalize();
  return {big, dir};
}

}  // namespace adiaspec
