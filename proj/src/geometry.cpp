#include "adiaspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "adiaspec/error.hpp"
#include "adiaspec/numerics.hpp"

namespace adiaspec {

namespace {

template <class T>
T fourier_sum(std::span<const Harmonic> terms, T zeta) {
  T sum = T(0);
  for (const auto& t : terms) {
    if (t.frequency == 0) {
      sum += t.cos_amp;
      continue;
    }
    const T arg = double(t.frequency) * zeta;
    sum += t.cos_amp * std::cos(arg) + t.sin_amp * std::sin(arg);
  }
  return sum;
}

template <class T>
T fourier_derivative(std::span<const Harmonic> terms, T zeta) {
  T sum = T(0);
  for (const auto& t : terms) {
    if (t.frequency == 0) continue;
    const double f = t.frequency;
    const T arg = f * zeta;
    sum += f * (t.sin_amp * std::cos(arg) - t.cos_amp * std::sin(arg));
  }
  return sum;
}

double fourier_second(std::span<const Harmonic> terms, double zeta) {
  double sum = 0.0;
  for (const auto& t : terms) {
    const double f = t.frequency;
    sum -= f * f * (t.cos_amp * std::cos(f * zeta) + t.sin_amp * std::sin(f * zeta));
  }
  return sum;
}

std::string edge_name(int j) { return "E" + std::to_string(j); }

}  // namespace

// ---------------------------------------------------------------------------
// AnalyticPotential

AnalyticPotential::AnalyticPotential(std::vector<Harmonic> terms, double strip_half_width)
    : terms_(std::move(terms)), strip_(strip_half_width) {
  require(std::isfinite(strip_) && strip_ > 0.0, ErrorKind::invalid_input,
          "strip half-width Y must be positive");
  int top = 0;
  double scale = 0.0;
  for (const auto& t : terms_) {
    require(t.frequency >= 0, ErrorKind::invalid_input, "negative harmonic frequency in W");
    require(std::isfinite(t.cos_amp) && std::isfinite(t.sin_amp), ErrorKind::invalid_input,
            "non-finite coefficient in W");
    if (t.frequency > 0) {
      top = std::max(top, t.frequency);
      scale += std::hypot(t.cos_amp, t.sin_amp) * t.frequency * t.frequency;
    }
  }
  require(scale > 0.0, ErrorKind::invalid_input, "W must not be constant");

  const int samples = 2048 * top;
  auto d = [&](double z) { return fourier_derivative<double>(terms_, z); };
  std::vector<double> maxima, minima;
  // Offset start so that extrema at sample points of symmetric W are bracketed.
  const double offset = 0.3819660112501051 * two_pi / samples;
  double prev = d(offset);
  for (int i = 1; i <= samples; ++i) {
    const double a = offset + two_pi * (i - 1) / samples;
    const double b = offset + two_pi * i / samples;
    const double cur = d(b);
    if (prev > 0.0 && cur <= 0.0) maxima.push_back(bisect(d, a, b, prev, cur, 1e-15));
    if (prev < 0.0 && cur >= 0.0) minima.push_back(bisect(d, a, b, prev, cur, 1e-15));
    prev = cur;
  }
  require(maxima.size() == 1 && minima.size() == 1, ErrorKind::invalid_input,
          "W must have exactly one maximum and one minimum per period (found " +
              std::to_string(maxima.size()) + " and " + std::to_string(minima.size()) + ")");
  const double zmax = std::fmod(maxima.front(), two_pi);
  const double zmin = std::fmod(minima.front(), two_pi);
  require(std::abs(fourier_second(terms_, zmax)) > 1e-8 * scale &&
              std::abs(fourier_second(terms_, zmin)) > 1e-8 * scale,
          ErrorKind::invalid_input, "extrema of W must be non-degenerate");
  shift_ = zmax;
  zeta_star_ = std::fmod(zmin - zmax + two_pi, two_pi);
  w_plus_ = fourier_sum<double>(terms_, zmax);
  w_minus_ = fourier_sum<double>(terms_, zmin);
}

double AnalyticPotential::operator()(double zeta) const {
  return fourier_sum<double>(terms_, zeta + shift_);
}
cplx AnalyticPotential::operator()(cplx zeta) const {
  return fourier_sum<cplx>(terms_, zeta + shift_);
}
double AnalyticPotential::derivative(double zeta) const {
  return fourier_derivative<double>(terms_, zeta + shift_);
}
cplx AnalyticPotential::derivative(cplx zeta) const {
  return fourier_derivative<cplx>(terms_, zeta + shift_);
}
double AnalyticPotential::second_derivative(double zeta) const {
  return fourier_second(terms_, zeta + shift_);
}

double AnalyticPotential::mean() const {
  double m = 0.0;
  for (const auto& t : terms_)
    if (t.frequency == 0) m += t.cos_amp;
  return m;
}

double AnalyticPotential::strip_bound(double y) const {
  double b = 0.0;
  for (const auto& t : terms_)
    if (t.frequency > 0) b += std::hypot(t.cos_amp, t.sin_amp) * std::cosh(t.frequency * y);
  return b;
}

double AnalyticPotential::inverse_minus(double w) const {
  require(w >= w_minus_ - 1e-12 && w <= w_plus_ + 1e-12, ErrorKind::consistency,
          "value outside the range of W");
  if (w >= w_plus_) return 0.0;
  if (w <= w_minus_) return zeta_star_;
  auto f = [&](double z) { return (*this)(z) - w; };
  return bisect(f, 0.0, zeta_star_, w_plus_ - w, w_minus_ - w, 1e-14);
}

double AnalyticPotential::inverse_plus(double w) const {
  require(w >= w_minus_ - 1e-12 && w <= w_plus_ + 1e-12, ErrorKind::consistency,
          "value outside the range of W");
  if (w >= w_plus_) return two_pi;
  if (w <= w_minus_) return zeta_star_;
  auto f = [&](double z) { return (*this)(z) - w; };
  return bisect(f, zeta_star_, two_pi, w_minus_ - w, w_plus_ - w, 1e-14);
}

// ---------------------------------------------------------------------------
// Window

double WindowReport::min_margin() const {
  double out = INFINITY;
  for (const auto& m : margins) out = std::min(out, m.value);
  return out;
}

namespace {

void check_indices(const BandStructure& bands, int n, int m) {
  require(n >= 1 && m >= 0, ErrorKind::invalid_input, "need n >= 1 and m >= 0");
  require(bands.has_edge(2 * (n + m) + 1), ErrorKind::coverage,
          "band structure must include E" + std::to_string(2 * (n + m) + 1) +
              "; raise the energy ceiling");
}

bool gaps_open(const BandStructure& bands, int n, int m) {
  for (int g = n - 1; g <= n + m; ++g)
    if (!bands.gap_is_open(g)) return false;
  return true;
}

}  // namespace

WindowReport analyze_window(const AnalyticPotential& w, const BandStructure& bands, double energy,
                            int n, int m) {
  check_indices(bands, n, m);
  WindowReport r;
  r.energy = energy;
  r.n = n;
  r.m = m;
  r.lower = energy - w.w_plus();
  r.upper = energy - w.w_minus();
  r.a1_ok = gaps_open(bands, n, m);

  r.a2_ok = true;
  for (int j = 2 * n - 1; j <= 2 * (n + m); ++j) {
    const double e = bands.edge(j);
    const double margin = std::min(e - r.lower, r.upper - e);
    r.margins.push_back({edge_name(j), margin});
    if (!(margin > 0.0)) r.a2_ok = false;
  }
  r.a3_ok = true;
  if (n > 1) {
    const double margin = r.lower - bands.edge(2 * n - 2);
    r.margins.push_back({edge_name(2 * n - 2), margin});
    if (!(margin > 0.0)) r.a3_ok = false;
  }
  const int top = 2 * (n + m) + 1;
  const double margin = bands.edge(top) - r.upper;
  r.margins.push_back({edge_name(top), margin});
  if (!(margin > 0.0)) r.a3_ok = false;
  return r;
}

AdmissibleInterval admissible_interval(const AnalyticPotential& w, const BandStructure& bands,
                                       int n, int m) {
  check_indices(bands, n, m);
  AdmissibleInterval out;
  out.gaps_open = gaps_open(bands, n, m);
  // Every margin is E - c or d - E.
  double c_up = bands.edge(2 * (n + m)) + w.w_minus();
  if (n > 1) c_up = std::max(c_up, bands.edge(2 * n - 2) + w.w_plus());
  const double d_dn =
      std::min(bands.edge(2 * n - 1) + w.w_plus(), bands.edge(2 * (n + m) + 1) + w.w_minus());
  out.lower = c_up;
  out.upper = d_dn;
  out.maximizer = 0.5 * (c_up + d_dn);
  return out;
}

// ---------------------------------------------------------------------------
// Strip check

namespace {

// Total change of arg(W - c) along Im zeta = y, 0 <= Re zeta <= 2pi.
double arg_change(const AnalyticPotential& w, double c, double y, double& min_abs) {
  constexpr int base = 2048;
  double total = 0.0;
  cplx prev = w(cplx(0.0, y)) - c;
  min_abs = std::abs(prev);
  for (int i = 1; i <= base; ++i) {
    const double a = two_pi * (i - 1) / base;
    const double b = two_pi * i / base;
    // Subdivide until each increment is small.
    int sub = 1;
    for (;;) {
      double piece = 0.0;
      cplx p = prev;
      bool fine = true;
      double local_min = min_abs;
      for (int k = 1; k <= sub; ++k) {
        const cplx cur = w(cplx(a + (b - a) * k / sub, y)) - c;
        const double step = std::arg(cur / p);
        if (std::abs(step) > 0.5) {
          fine = false;
          break;
        }
        piece += step;
        local_min = std::min(local_min, std::abs(cur));
        p = cur;
      }
      if (fine || sub >= 1 << 16) {
        total += piece;
        prev = p;
        min_abs = local_min;
        break;
      }
      sub *= 4;
    }
  }
  return total;
}

}  // namespace

StripReport check_strip(const AdiabaticModel& model, double energy) {
  StripReport out;
  const auto& w = model.w;
  const double y = w.strip_half_width();
  const double bound = w.strip_bound(y);
  const double mean = w.mean();
  // E - W(zeta) stays within this disc around E - mean on the strip.
  const double top = energy - mean + bound;
  if (top > model.bands.energy_ceiling) {
    out.ok = false;
    out.problems.push_back("band structure does not cover E - W on the strip; raise the ceiling");
  }
  for (int j = 1; model.bands.has_edge(j); ++j) {
    const double c = energy - model.bands.edge(j);
    if (std::abs(c - mean) > bound) continue;
    double min_bottom = 0.0, min_top = 0.0;
    const double bottom = arg_change(w, c, -y, min_bottom);
    const double upper = arg_change(w, c, y, min_top);
    const int zeros = static_cast<int>(std::lround((bottom - upper) / two_pi));
    const int real_zeros = (c > w.w_minus() && c < w.w_plus()) ? 2 : 0;
    if (std::min(min_bottom, min_top) < 1e-9 * std::max(1.0, bound)) {
      out.ok = false;
      out.problems.push_back("branch point of E" + std::to_string(j) +
                             " lies on the strip boundary");
    } else if (zeros != real_zeros) {
      out.ok = false;
      out.problems.push_back("complex branch points of E" + std::to_string(j) +
                             " inside the strip (" + std::to_string(zeros - real_zeros) + ")");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Branch points and pre-intervals

double IsoEnergyGeometry::zeta(int j, int sign) const {
  for (const auto& b : branch_points)
    if (b.index == j && b.sign == sign) return b.zeta;
  fail(ErrorKind::invalid_input, "no branch point for E" + std::to_string(j));
}

const LabeledInterval& IsoEnergyGeometry::pre_band(const std::string& label) const {
  for (const auto& z : pre_bands)
    if (z.label == label) return z;
  fail(ErrorKind::invalid_input, "unknown pre-band label " + label);
}

const LabeledInterval& IsoEnergyGeometry::pre_gap(const std::string& label) const {
  for (const auto& g : pre_gaps)
    if (g.label == label) return g;
  fail(ErrorKind::invalid_input, "unknown pre-gap label " + label);
}

IsoEnergyGeometry branch_points(const AnalyticPotential& w, const BandStructure& bands,
                                const WindowReport& report) {
  require(report.all_ok(), ErrorKind::assumption_failure,
          "window assumptions fail at E = " + std::to_string(report.energy));
  const int n = report.n;
  const int m = report.m;
  IsoEnergyGeometry g;
  g.energy = report.energy;
  g.n = n;
  g.m = m;
  g.zeta_star = w.zeta_star();

  std::vector<BranchPoint> minus, plus;
  for (int j = 2 * n - 1; j <= 2 * (n + m); ++j) {
    const double c = report.energy - bands.edge(j);
    require(c > w.w_minus() && c < w.w_plus(), ErrorKind::consistency,
            "edge E" + std::to_string(j) + " is outside the window");
    minus.push_back({j, -1, w.inverse_minus(c)});
    plus.push_back({j, +1, w.inverse_plus(c)});
  }
  g.branch_points = minus;
  g.branch_points.insert(g.branch_points.end(), plus.rbegin(), plus.rend());

  auto zm = [&](int j) { return minus[static_cast<std::size_t>(j - (2 * n - 1))].zeta; };
  auto zp = [&](int j) { return plus[static_cast<std::size_t>(j - (2 * n - 1))].zeta; };
  const std::string nm = std::to_string(n - 1);
  const std::string top = std::to_string(n + m);

  g.pre_gaps.push_back({"g" + nm, n - 1, 0, zp(2 * n - 1) - two_pi, zm(2 * n - 1)});
  for (int b = n; b <= n + m; ++b) {
    const std::string s = std::to_string(b);
    g.pre_bands.push_back({"z" + s + "-", b, -1, zm(2 * b - 1), zm(2 * b)});
    if (b < n + m) g.pre_gaps.push_back({"g" + s + "-", b, -1, zm(2 * b), zm(2 * b + 1)});
  }
  g.pre_gaps.push_back({"g" + top, n + m, 0, zm(2 * (n + m)), zp(2 * (n + m))});
  for (int b = n + m; b >= n; --b) {
    const std::string s = std::to_string(b);
    if (b < n + m) g.pre_gaps.push_back({"g" + s + "+", b, +1, zp(2 * b + 1), zp(2 * b)});
    g.pre_bands.push_back({"z" + s + "+", b, +1, zp(2 * b), zp(2 * b - 1)});
  }
  return g;
}

// ---------------------------------------------------------------------------
// Complex momentum

MomentumValue complex_momentum(const AdiabaticModel& model, double energy, cplx zeta,
                               ZetaSide side) {
  require(is_finite(zeta), ErrorKind::invalid_input, "zeta must be finite");
  require(std::abs(zeta.imag()) < model.w.strip_half_width(), ErrorKind::invalid_input,
          "zeta lies outside the analyticity strip");
  MomentumValue out;
  if (zeta.imag() == 0.0) {
    const double e = energy - model.w(zeta.real());
    if (side == ZetaSide::off_axis) {
      const auto where = model.bands.locate(e);
      require(where.kind == SpectralLocation::Kind::band, ErrorKind::branch_selection,
              "real zeta in a pre-gap needs the +i0 or -i0 side");
    }
    const auto q = quasimomentum_main(model.v, model.bands, e,
                                      side == ZetaSide::lower ? Side::lower : Side::upper,
                                      model.ode_tol);
    out.value = q.value;
    out.degenerate = q.degenerate;
    return out;
  }
  const cplx e = energy - model.w(zeta);
  if (e.imag() == 0.0) {
    const auto where = model.bands.locate(e.real());
    require(where.kind == SpectralLocation::Kind::band, ErrorKind::path,
            "zeta maps onto a spectral cut of the quasi-momentum");
  }
  const auto q = quasimomentum_main(model.v, model.bands, e, Side::upper, model.ode_tol);
  out.value = q.value;
  out.degenerate = q.degenerate;
  return out;
}

// ---------------------------------------------------------------------------
// Real branches

struct RealBranch::Table {
  std::vector<double> kappa;
  std::vector<double> zeta;
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

RealBranch::RealBranch(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                       const std::string& label)
    : model_(model), energy_(geom.energy), label_(label), interval_(geom.pre_band(label)) {
  std::vector<double> k(kNodes), z(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    k[i] = 0.5 * pi * (1.0 - std::cos(pi * i / (kNodes - 1)));
    z[i] = evaluate(k[i]);
  }
  k.front() = 0.0;
  k.back() = pi;
  // pchip wants increasing abscissae; zeta decreases on I+.
  std::vector<double> kc = k, zc = z;
  table_ = std::make_shared<const Table>(
      Table{k, z, boost::math::interpolators::pchip<std::vector<double>>(std::move(kc), std::move(zc))});
}

std::span<const double> RealBranch::kappa_nodes() const noexcept { return table_->kappa; }
std::span<const double> RealBranch::zeta_nodes() const noexcept { return table_->zeta; }

double RealBranch::reduce(double kappa) {
  const double a = std::abs(kappa);
  double r = a - two_pi * std::floor(a / two_pi);
  if (r > pi) r = two_pi - r;
  return std::clamp(r, 0.0, pi);
}

double RealBranch::evaluate(double kappa) const {
  require(std::isfinite(kappa), ErrorKind::invalid_input, "kappa must be finite");
  const double r = reduce(kappa);
  const int j = interval_.index;
  const double e = band_energy(model_.v, model_.bands, j, pi * (j - 1) + r, model_.ode_tol);
  const double c = energy_ - e;
  return interval_.sign < 0 ? model_.w.inverse_minus(c) : model_.w.inverse_plus(c);
}

double RealBranch::interpolate(double kappa) const {
  require(std::isfinite(kappa), ErrorKind::invalid_input, "kappa must be finite");
  return table_->spline(reduce(kappa));
}

double RealBranch::reduced_momentum(double zeta) const {
  const double e = energy_ - model_.w(zeta);
  const auto q = quasimomentum_main(model_.v, model_.bands, e, Side::upper, model_.ode_tol);
  return q.value.real() - pi * (interval_.index - 1);
}

// ---------------------------------------------------------------------------
// Stokes lines

namespace {

struct FieldSample {
  cplx velocity;
  cplx kappa;
  bool ok;
};

FieldSample stokes_field(const AdiabaticModel& model, double energy, cplx zeta, cplx kappa_prev,
                         StokesFamily family, int direction) {
  const cplx d = discriminant(model.v, energy - model.w(zeta), model.ode_tol);
  double sep = 0.0;
  const cplx k = nearest_quasimomentum_root(d, kappa_prev, &sep);
  const bool ok = std::abs(k - kappa_prev) < 0.25 * sep;
  const cplx f = family == StokesFamily::kappa ? k : k - pi;
  const double mag = std::abs(f);
  if (mag < 1e-12)
    throw Error(ErrorKind::stall, "Stokes field vanishes at zeta = " + std::to_string(zeta.real()) +
                                      std::to_string(zeta.imag()) + "i");
  return {double(direction) * std::conj(f) / mag, k, ok};
}

double distance_to_branch_points(const IsoEnergyGeometry& geom, cplx zeta) {
  double best = INFINITY;
  for (const auto& b : geom.branch_points) {
    for (double shift : {-two_pi, 0.0, two_pi})
      best = std::min(best, std::abs(zeta - cplx(b.zeta + shift, 0.0)));
  }
  return best;
}

}  // namespace

StokesLine trace_stokes_line(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                             cplx start, StokesFamily family, int direction,
                             const StokesOptions& options) {
  const auto k0 = complex_momentum(model, geom.energy, start,
                                   start.imag() == 0.0 ? ZetaSide::upper : ZetaSide::off_axis);
  return trace_stokes_line(model, geom, start, k0.value, family, direction, options);
}

StokesLine trace_stokes_line(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                             cplx start, cplx start_momentum, StokesFamily family, int direction,
                             const StokesOptions& options) {
  require(direction == 1 || direction == -1, ErrorKind::invalid_input,
          "direction must be +1 or -1");
  require(options.max_length > 0.0 && options.max_step > 0.0 && options.tolerance > 0.0,
          ErrorKind::invalid_input, "Stokes options must be positive");
  const double y_max = model.w.strip_half_width();
  require(std::abs(start.imag()) < y_max, ErrorKind::invalid_input,
          "start lies outside the analyticity strip");
  if (distance_to_branch_points(geom, start) <= options.stop_radius)
    fail(ErrorKind::degenerate_point, "Stokes line starts at a branch point");

  const double energy = geom.energy;
  StokesLine line;
  cplx z = start;
  cplx k = start_momentum;
  line.points.push_back(z);
  line.momenta.push_back(k);

  auto rk4 = [&](cplx z0, cplx k0, double h, cplx& z1, cplx& k1) {
    const auto s1 = stokes_field(model, energy, z0, k0, family, direction);
    const auto s2 = stokes_field(model, energy, z0 + 0.5 * h * s1.velocity, s1.kappa, family, direction);
    const auto s3 = stokes_field(model, energy, z0 + 0.5 * h * s2.velocity, s2.kappa, family, direction);
    const auto s4 = stokes_field(model, energy, z0 + h * s3.velocity, s3.kappa, family, direction);
    z1 = z0 + h / 6.0 * (s1.velocity + 2.0 * s2.velocity + 2.0 * s3.velocity + s4.velocity);
    const auto end = stokes_field(model, energy, z1, s4.kappa, family, direction);
    k1 = end.kappa;
    return s1.ok && s2.ok && s3.ok && s4.ok && end.ok;
  };

  double h = std::min(options.max_step, 0.1 * options.max_length);
  int rejected_in_row = 0;
  while (line.length < options.max_length) {
    const double near = distance_to_branch_points(geom, z);
    if (near <= options.stop_radius) {
      line.stop = StokesLine::Stop::branch_point;
      return line;
    }
    double step = std::min({h, options.max_step, options.max_length - line.length, 0.5 * near});
    cplx z_full, k_full, z_mid, k_mid, z_half, k_half;
    const bool ok1 = rk4(z, k, step, z_full, k_full);
    const bool ok2 = rk4(z, k, 0.5 * step, z_mid, k_mid);
    const bool ok3 = ok2 && rk4(z_mid, k_mid, 0.5 * step, z_half, k_half);
    const double err = ok1 && ok3 ? std::abs(z_full - z_half) / 15.0 : INFINITY;
    const double budget = options.tolerance * step;
    if (!(err <= budget)) {
      h = 0.25 * step;
      if (std::isfinite(err)) h = std::max(h, step * 0.9 * std::pow(budget / err, 0.25));
      h = std::min(h, 0.5 * step);
      if (h < 1e-14 || ++rejected_in_row > 200)
        fail(ErrorKind::stall, "Stokes tracer step size collapsed");
      continue;
    }
    rejected_in_row = 0;
    if (std::abs(z_half.imag()) >= y_max) {
      // Shorten the final step to land on the strip boundary.
      const double frac = (y_max - std::abs(z.imag())) / std::abs(z_half.imag() - z.imag());
      cplx zb, kb;
      rk4(z, k, step * std::clamp(frac, 0.0, 1.0) * 0.999999, zb, kb);
      line.points.push_back(zb);
      line.momenta.push_back(kb);
      line.length += step * std::clamp(frac, 0.0, 1.0) * 0.999999;
      line.stop = StokesLine::Stop::strip_boundary;
      return line;
    }
    z = z_half;
    k = k_half;
    line.length += step;
    line.points.push_back(z);
    line.momenta.push_back(k);
    const double grow = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(budget / err, 0.25), 0.2, 4.0);
    h = std::min(options.max_step, step * grow);
  }
  line.stop = StokesLine::Stop::max_length;
  return line;
}

// ---------------------------------------------------------------------------
// Period index and spectrum

PeriodIndex period_index(std::span<const double> crossings) {
  PeriodIndex out;
  const std::size_t n = crossings.size();
  out.signature = n % 2 == 0 ? 1 : -1;
  // Neumaier summation of (-1)^(N-i) r_i, from r_1 upwards.
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double term = ((n - 1 - i) % 2 == 0 ? 1.0 : -1.0) * crossings[i];
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  out.index = (sum + comp) / pi;
  return out;
}

std::vector<Interval> sigma_set(std::vector<Interval> bands, double w_minus, double w_plus) {
  require(w_minus <= w_plus, ErrorKind::invalid_input, "need W- <= W+");
  for (auto& b : bands) {
    b.first += w_minus;
    b.second += w_plus;
  }
  std::sort(bands.begin(), bands.end());
  std::vector<Interval> out;
  for (const auto& b : bands) {
    if (!out.empty() && b.first <= out.back().second)
      out.back().second = std::max(out.back().second, b.second);
    else
      out.push_back(b);
  }
  return out;
}

std::vector<Interval> sigma_set(const BandStructure& bands, double w_minus, double w_plus) {
  return sigma_set(bands.band_intervals(), w_minus, w_plus);
}

}  // namespace adiaspec
