#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adiaspec/geometry.hpp"

namespace adiaspec {

struct ActionEntry {
  std::string label;
  double action = 0.0;
  double quadrature_error = 0.0;
};

struct ActionSet {
  double energy = 0.0;
  std::vector<ActionEntry> entries;
  double total_action = 0.0;
};

struct ActionValue {
  double value = 0.0;
  double error = 0.0;
};

/// S = 2 * integral of Im kappa(zeta + i0) over the pre-gap. With
/// Side::lower the -i0 boundary value is integrated and the sign flipped.
ActionValue tunneling_action(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                             const std::string& label, Side side = Side::upper,
                             double rel_tol = 1e-10);

/// Same integral with a fixed composite Gauss rule of `panels` x 30 nodes per half.
double tunneling_action_fixed(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                              const std::string& label, int panels, Side side = Side::upper);

/// Actions of every pre-gap of `geom`.
ActionSet tunneling_actions(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                            double rel_tol = 1e-10);

struct Coefficient {
  double value = 1.0;
  double log_value = 0.0;
  bool underflow = false;
};

/// t = exp(-S / (2 epsilon)), carried in the log domain.
Coefficient tunneling_coefficient(double action, double epsilon);

/// T = product of t over the set; log T = -total action / (2 epsilon).
Coefficient total_T(const ActionSet& actions, double epsilon);

struct AsymptoticLyapunov {
  double energy = 0.0;
  double theta_asym = 0.0;             // total action / (4 pi)
  double theta_from_coefficients = 0.0;  // (epsilon / 2 pi) sum ln(1/t)
  std::vector<std::pair<std::string, double>> contributions;
};

AsymptoticLyapunov lyapunov_asymptotic(const ActionSet& actions, double epsilon);

/// [1 / (C T), C / T].
std::pair<double, double> coefficient_magnitude_window(double t_total, double c);
/// The same window in logs, for T below the double range.
std::pair<double, double> coefficient_magnitude_window_log(double log_t_total, double c);

}  // namespace adiaspec
