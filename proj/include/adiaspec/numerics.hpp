#pragma once

#include <cmath>
#include <string>

#include "adiaspec/error.hpp"

namespace adiaspec {

/// Bisection for a sign change of `f` on [a, b]. Stops when the bracket is
/// narrower than `tol`. `fa` and `fb` are the already known end values.
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb, double tol) {
  require(std::isfinite(fa) && std::isfinite(fb), ErrorKind::consistency,
          "bisect: non-finite bracket values");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  require((fa < 0) != (fb < 0), ErrorKind::consistency,
          "bisect: root is not bracketed on [" + std::to_string(a) + ", " +
              std::to_string(b) + "]");
  for (int it = 0; it < 400 && std::abs(b - a) > tol; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

template <class F>
double bisect(F&& f, double a, double b, double tol) {
  return bisect(f, a, b, f(a), f(b), tol);
}

}  // namespace adiaspec
