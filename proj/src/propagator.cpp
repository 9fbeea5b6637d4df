#include "adiaspec/propagator.hpp"

#include <cmath>

namespace adiaspec::detail {

namespace {

GaussTableau build_gauss_tableau() {
  using ld = long double;
  // Legendre roots on [-1, 1] and weights for four nodes.
  const ld r = std::sqrt(ld(6) / ld(5));
  const ld inner = std::sqrt((ld(3) - ld(2) * r) / ld(7));
  const ld outer = std::sqrt((ld(3) + ld(2) * r) / ld(7));
  const ld w_inner = (ld(18) + std::sqrt(ld(30))) / ld(36);
  const ld w_outer = (ld(18) - std::sqrt(ld(30))) / ld(36);
  const std::array<ld, 4> x = {-outer, -inner, inner, outer};
  const std::array<ld, 4> w = {w_outer, w_inner, w_inner, w_outer};

  std::array<ld, 4> c{};
  for (int i = 0; i < 4; ++i) c[i] = (ld(1) + x[i]) / ld(2);

  GaussTableau tab{};
  for (int j = 0; j < 4; ++j) {
    // Lagrange basis polynomial l_j in monomial form.
    std::array<ld, 4> poly = {1, 0, 0, 0};
    ld denom = 1;
    for (int k = 0; k < 4; ++k) {
      if (k == j) continue;
      std::array<ld, 4> next{};
      for (int d = 0; d < 3; ++d) {
        next[d + 1] += poly[d];
        next[d] -= c[k] * poly[d];
      }
      poly = next;
      denom *= c[j] - c[k];
    }
    for (int i = 0; i < 4; ++i) {
      ld integral = 0;
      ld power = c[i];
      for (int d = 0; d < 4; ++d) {
        integral += poly[d] * power / ld(d + 1);
        power *= c[i];
      }
      tab.a[i][j] = static_cast<double>(integral / denom);
    }
    tab.b[j] = static_cast<double>(w[j] / ld(2));
    tab.c[j] = static_cast<double>(c[j]);
  }
  return tab;
}

}  // namespace

const GaussTableau& gauss_tableau() {
  static const GaussTableau tab = build_gauss_tableau();
  return tab;
}

}  // namespace adiaspec::detail
