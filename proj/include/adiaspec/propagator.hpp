#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "adiaspec/error.hpp"

namespace adiaspec {

namespace detail {

/// Four-stage Gauss-Legendre collocation tableau (order 8).
struct GaussTableau {
  std::array<double, 4> c;
  std::array<double, 4> b;
  std::array<std::array<double, 4>, 4> a;
};

const GaussTableau& gauss_tableau();

}  // namespace detail

template <class Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

template <class Scalar>
struct Propagation {
  Mat2T<Scalar> matrix = Mat2T<Scalar>::Identity();
  double error = 0.0;  // sum of accepted local error estimates
  int steps = 0;
};

/// Step-size state carried between consecutive propagations.
struct StepHint {
  double step = 0.05;
};

/// One Gauss-Legendre step of y' = [[0, 1], [q(x), 0]] y started from the
/// identity. Collocation methods preserve the Wronskian exactly, so the
/// returned matrix is unimodular up to rounding at any step size.
template <class Scalar, class Q>
Mat2T<Scalar> gauss_step(const Q& q, double x, double h) {
  const auto& tab = detail::gauss_tableau();
  using Big = Eigen::Matrix<Scalar, 8, 8>;
  using Rhs = Eigen::Matrix<Scalar, 8, 2>;
  std::array<Scalar, 4> qs;
  for (int j = 0; j < 4; ++j) qs[j] = q(x + tab.c[j] * h);

  // Unknowns: stage values Y_i. Row block i reads Y_i - h sum_j a_ij A_j Y_j = I.
  Big sys = Big::Identity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double ha = h * tab.a[i][j];
      // A_j = [[0, 1], [q_j, 0]]
      sys(2 * i, 2 * j + 1) -= Scalar(ha);
      sys(2 * i + 1, 2 * j) -= ha * qs[j];
    }
  }
  Rhs rhs = Rhs::Zero();
  for (int i = 0; i < 4; ++i) {
    rhs(2 * i, 0) = Scalar(1);
    rhs(2 * i + 1, 1) = Scalar(1);
  }
  const Rhs stages = sys.partialPivLu().solve(rhs);

  Mat2T<Scalar> phi = Mat2T<Scalar>::Identity();
  for (int j = 0; j < 4; ++j) {
    const double hb = h * tab.b[j];
    // A_j * Y_j
    phi.row(0) += hb * stages.row(2 * j + 1);
    phi.row(1) += (hb * qs[j]) * stages.row(2 * j);
  }
  return phi;
}

/// Propagates y' = [[0, 1], [q(x), 0]] y across [x0, x1] with step-doubling
/// error control. The local error budget is tol per unit length.
template <class Scalar, class Q>
Propagation<Scalar> propagate(const Q& q, double x0, double x1, double tol, StepHint& hint) {
  require(tol > 0.0, ErrorKind::invalid_input, "tolerance must be positive");
  require(x1 > x0, ErrorKind::invalid_input, "propagation interval must have x1 > x0");
  Propagation<Scalar> out;
  const double len = x1 - x0;
  const double min_step = 1e-13 * std::max(1.0, len);
  constexpr double roundoff_floor = 1e-15;
  double h = std::clamp(hint.step, min_step, len);
  double x = x0;
  while (x < x1) {
    const bool last = x + h >= x1;
    const double step = last ? x1 - x : h;
    const Mat2T<Scalar> full = gauss_step<Scalar>(q, x, step);
    const Mat2T<Scalar> half =
        gauss_step<Scalar>(q, x + 0.5 * step, 0.5 * step) * gauss_step<Scalar>(q, x, 0.5 * step);
    const double scale = std::max(1.0, half.cwiseAbs().maxCoeff());
    const double err = (full - half).cwiseAbs().maxCoeff() / scale / 255.0;
    const double budget = tol * step / len;
    if (!std::isfinite(err))
      throw Error(ErrorKind::convergence_failure, "non-finite solution during propagation",
                  out.error);
    if (err <= budget || err <= roundoff_floor) {
      out.matrix = half * out.matrix;
      out.error += err;
      ++out.steps;
      x = last ? x1 : x + step;
    }
    const double factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(budget / err, 1.0 / 9.0), 0.2, 4.0);
    const double next = step * factor;
    if (next < min_step && x < x1)
      throw Error(ErrorKind::convergence_failure,
                  "step size underflow at x = " + std::to_string(x), out.error);
    // Keep the unclipped proposal for the next call when the last step was short.
    if (!last || err > budget) h = next;
    else h = std::max(h, next);
  }
  hint.step = h;
  return out;
}

}  // namespace adiaspec
