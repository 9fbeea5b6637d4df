#pragma once

// Reference propagator: classical RK4 with a fixed step, no error control.
// Shares no code with the library integrator.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;
using Mat = std::array<std::array<cplx, 2>, 2>;

inline Mat rk4_period_map(const std::function<double(double)>& v, cplx e, double x0, double x1,
                          int steps = 100000) {
  // Columns evolve independently: y = (psi, psi'), y' = (psi', (V - E) psi).
  Mat out{};
  for (int col = 0; col < 2; ++col) {
    cplx p = col == 0 ? 1.0 : 0.0;
    cplx dp = col == 0 ? 0.0 : 1.0;
    const double h = (x1 - x0) / steps;
    for (int i = 0; i < steps; ++i) {
      const double x = x0 + i * h;
      auto f = [&](double xx, cplx a, cplx b, cplx& da, cplx& db) {
        da = b;
        db = (v(xx) - e) * a;
      };
      cplx k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
      f(x, p, dp, k1a, k1b);
      f(x + h / 2, p + h / 2 * k1a, dp + h / 2 * k1b, k2a, k2b);
      f(x + h / 2, p + h / 2 * k2a, dp + h / 2 * k2b, k3a, k3b);
      f(x + h, p + h * k3a, dp + h * k3b, k4a, k4b);
      p += h / 6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      dp += h / 6 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    }
    out[0][col] = p;
    out[1][col] = dp;
  }
  return out;
}

inline cplx rk4_discriminant(const std::function<double(double)>& v, cplx e, int steps = 100000) {
  const Mat m = rk4_period_map(v, e, 0.0, 1.0, steps);
  return m[0][0] + m[1][1];
}

}  // namespace oracle
