#pragma once

#include <span>
#include <vector>

namespace adiaspec {

/// One Fourier mode: cos_amp*cos(f*t) + sin_amp*sin(f*t), where t is 2*pi*x
/// for the fast potential and zeta for the slow one.
struct Harmonic {
  int frequency = 0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

/// Constant piece of a step profile, valid from `start` up to the next start.
/// The last piece wraps around to the first start + 1.
struct Step {
  double start = 0.0;
  double value = 0.0;
};

/// Real 1-periodic potential of the unperturbed Hill operator.
class PeriodicPotential {
 public:
  enum class Kind { trig_sum, piecewise_constant };

  static PeriodicPotential trig_sum(std::vector<Harmonic> terms);
  static PeriodicPotential piecewise_constant(std::vector<Step> steps);
  static PeriodicPotential zero() { return trig_sum({}); }

  Kind kind() const noexcept { return kind_; }
  std::span<const Harmonic> harmonics() const noexcept { return harmonics_; }
  std::span<const Step> steps() const noexcept { return steps_; }

  double operator()(double x) const;

  /// Rigorous bounds on V over a period.
  double lower_bound() const noexcept { return lower_; }
  double upper_bound() const noexcept { return upper_; }

  /// Points in (x0, x1) where the profile jumps (empty for trig sums).
  std::vector<double> discontinuities(double x0, double x1) const;

 private:
  PeriodicPotential() = default;

  Kind kind_ = Kind::trig_sum;
  std::vector<Harmonic> harmonics_;
  std::vector<Step> steps_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

}  // namespace adiaspec
