#include "adiaspec/actions.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "adiaspec/error.hpp"

namespace adiaspec {

namespace {

struct GapIntegral {
  const AdiabaticModel& model;
  double energy;
  const LabeledInterval& gap;
  Side side;

  double sign() const { return side == Side::upper ? 1.0 : -1.0; }

  // 2 Im kappa on the requested side, oriented to be non-negative.
  double density(double zeta) const {
    const double e = energy - model.w(zeta);
    const auto q = quasimomentum_main(model.v, model.bands, e, side, model.ode_tol);
    const double val = 2.0 * sign() * q.value.imag();
    if (val < 0.0)
      fail(ErrorKind::branch_selection,
           "negative action density on " + gap.label + "; wrong boundary side");
    return val;
  }

  double half() const { return 0.5 * gap.length(); }

  // zeta = lower + u^2 and zeta = upper - u^2 on the two halves.
  double left(double u) const { return 2.0 * u * density(gap.lower + u * u); }
  double right(double u) const { return 2.0 * u * density(gap.upper - u * u); }
};

const LabeledInterval& find_gap(const IsoEnergyGeometry& geom, const std::string& label) {
  const auto& gap = geom.pre_gap(label);
  require(gap.length() > 0.0, ErrorKind::degenerate_point,
          "pre-gap " + label + " has zero length (closed gap)");
  return gap;
}

}  // namespace

ActionValue tunneling_action(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                             const std::string& label, Side side, double rel_tol) {
  require(rel_tol > 0.0, ErrorKind::invalid_input, "quadrature tolerance must be positive");
  const auto& gap = find_gap(geom, label);
  const GapIntegral g{model, geom.energy, gap, side};
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double top = std::sqrt(g.half());
  double err_l = 0.0, err_r = 0.0, l1 = 0.0, l2 = 0.0;
  const double a = GK::integrate([&](double u) { return g.left(u); }, 0.0, top, 15, rel_tol, &err_l, &l1);
  const double b = GK::integrate([&](double u) { return g.right(u); }, 0.0, top, 15, rel_tol, &err_r, &l2);
  ActionValue out;
  out.value = a + b;
  out.error = err_l + err_r;
  if (!(out.error <= 1e-8 * std::abs(out.value)))
    throw Error(ErrorKind::convergence_failure, "action quadrature missed 1e-8 on " + label,
                out.error);
  return out;
}

double tunneling_action_fixed(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                              const std::string& label, int panels, Side side) {
  require(panels >= 1, ErrorKind::invalid_input, "need at least one panel");
  const auto& gap = find_gap(geom, label);
  const GapIntegral g{model, geom.energy, gap, side};
  using G = boost::math::quadrature::gauss<double, 30>;
  const double top = std::sqrt(g.half());
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double u0 = top * p / panels;
    const double u1 = top * (p + 1) / panels;
    sum += G::integrate([&](double u) { return g.left(u); }, u0, u1);
    sum += G::integrate([&](double u) { return g.right(u); }, u0, u1);
  }
  return sum;
}

ActionSet tunneling_actions(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                            double rel_tol) {
  ActionSet out;
  out.energy = geom.energy;
  for (const auto& gap : geom.pre_gaps) {
    const auto s = tunneling_action(model, geom, gap.label, Side::upper, rel_tol);
    out.entries.push_back({gap.label, s.value, s.error});
    out.total_action += s.value;
  }
  return out;
}

Coefficient tunneling_coefficient(double action, double epsilon) {
  require(std::isfinite(action) && action >= 0.0, ErrorKind::invalid_input,
          "tunneling action must be non-negative");
  require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::invalid_input,
          "epsilon must be positive");
  Coefficient c;
  c.log_value = -action / (2.0 * epsilon);
  c.value = std::exp(c.log_value);
  c.underflow = c.value == 0.0;
  return c;
}

Coefficient total_T(const ActionSet& actions, double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::invalid_input,
          "epsilon must be positive");
  Coefficient c;
  c.log_value = -actions.total_action / (2.0 * epsilon);
  c.value = std::exp(c.log_value);
  c.underflow = c.value == 0.0;
  return c;
}

AsymptoticLyapunov lyapunov_asymptotic(const ActionSet& actions, double epsilon) {
  require(!actions.entries.empty(), ErrorKind::invalid_input, "empty action set");
  AsymptoticLyapunov out;
  out.energy = actions.energy;
  out.theta_asym = actions.total_action / (4.0 * pi);
  double sum_log = 0.0;
  for (const auto& e : actions.entries) {
    const auto t = tunneling_coefficient(e.action, epsilon);
    sum_log += -t.log_value;
    out.contributions.emplace_back(e.label, e.action / (4.0 * pi));
  }
  out.theta_from_coefficients = epsilon / (2.0 * pi) * sum_log;
  return out;
}

std::pair<double, double> coefficient_magnitude_window(double t_total, double c) {
  require(t_total > 0.0 && std::isfinite(t_total), ErrorKind::invalid_input, "need T > 0");
  require(c > 1.0 && std::isfinite(c), ErrorKind::invalid_input, "need C > 1");
  return {1.0 / (c * t_total), c / t_total};
}

std::pair<double, double> coefficient_magnitude_window_log(double log_t_total, double c) {
  require(std::isfinite(log_t_total), ErrorKind::invalid_input, "log T must be finite");
  require(c > 1.0 && std::isfinite(c), ErrorKind::invalid_input, "need C > 1");
  return {-std::log(c) - log_t_total, std::log(c) - log_t_total};
}

}  // namespace adiaspec
