#include "adiaspec/potential.hpp"

#include <algorithm>
#include <cmath>

#include "adiaspec/error.hpp"
#include "adiaspec/linalg.hpp"

namespace adiaspec {

PeriodicPotential PeriodicPotential::trig_sum(std::vector<Harmonic> terms) {
  PeriodicPotential v;
  v.kind_ = Kind::trig_sum;
  double mean = 0.0;
  double spread = 0.0;
  for (const auto& t : terms) {
    require(t.frequency >= 0, ErrorKind::invalid_input, "negative harmonic frequency");
    require(std::isfinite(t.cos_amp) && std::isfinite(t.sin_amp), ErrorKind::invalid_input,
            "non-finite potential coefficient");
    if (t.frequency == 0)
      mean += t.cos_amp;
    else
      spread += std::hypot(t.cos_amp, t.sin_amp);
  }
  v.harmonics_ = std::move(terms);
  v.lower_ = mean - spread;
  v.upper_ = mean + spread;
  return v;
}

PeriodicPotential PeriodicPotential::piecewise_constant(std::vector<Step> steps) {
  require(!steps.empty(), ErrorKind::invalid_input, "piecewise potential needs at least one step");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    require(std::isfinite(s.start) && std::isfinite(s.value), ErrorKind::invalid_input,
            "non-finite piecewise potential entry");
    require(s.start >= 0.0 && s.start < 1.0, ErrorKind::invalid_input,
            "breakpoints must lie in [0, 1)");
    if (i > 0)
      require(s.start > steps[i - 1].start, ErrorKind::invalid_input,
              "breakpoints must be strictly increasing");
  }
  PeriodicPotential v;
  v.kind_ = Kind::piecewise_constant;
  auto [lo, hi] = std::minmax_element(steps.begin(), steps.end(),
                                      [](const Step& a, const Step& b) { return a.value < b.value; });
  v.lower_ = lo->value;
  v.upper_ = hi->value;
  v.steps_ = std::move(steps);
  return v;
}

double PeriodicPotential::operator()(double x) const {
  if (kind_ == Kind::trig_sum) {
    double sum = 0.0;
    for (const auto& t : harmonics_) {
      if (t.frequency == 0) {
        sum += t.cos_amp;
        continue;
      }
      const double arg = two_pi * t.frequency * x;
      sum += t.cos_amp * std::cos(arg) + t.sin_amp * std::sin(arg);
    }
    return sum;
  }
  const double frac = x - std::floor(x);
  // The piece containing frac is the last one starting at or before it;
  // before the first start we are still in the wrapped last piece.
  auto it = std::upper_bound(steps_.begin(), steps_.end(), frac,
                             [](double v, const Step& s) { return v < s.start; });
  if (it == steps_.begin()) return steps_.back().value;
  return std::prev(it)->value;
}

std::vector<double> PeriodicPotential::discontinuities(double x0, double x1) const {
  std::vector<double> out;
  if (kind_ != Kind::piecewise_constant || steps_.size() < 2) return out;
  const double first_period = std::floor(x0);
  for (double p = first_period; p < x1; p += 1.0) {
    for (const auto& s : steps_) {
      const double x = p + s.start;
      if (x > x0 && x < x1) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace adiaspec
