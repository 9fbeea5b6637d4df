#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adiaspec/geometry.hpp"
#include "adiaspec/linalg.hpp"
#include "adiaspec/potential.hpp"

namespace adiaspec {

enum class FamilyKind { model_m0, herman_test, user_table, other };

/// 1-periodic map z -> 2x2 complex matrix.
class MatrixFamily {
 public:
  using Evaluator = std::function<Mat2c(double)>;

  MatrixFamily(FamilyKind kind, Evaluator evaluator, std::vector<cplx> parameters = {});

  Mat2c operator()(double z) const { return eval_(z); }
  FamilyKind kind() const noexcept { return kind_; }
  const std::vector<cplx>& parameters() const noexcept { return params_; }

  /// Matrices sampled at z = k / n, k = 0..n-1, repeated periodically with
  /// piecewise-constant lookup.
  static MatrixFamily table(std::vector<Mat2c> samples);

 private:
  FamilyKind kind_;
  Evaluator eval_;
  std::vector<cplx> params_;
};

struct CocycleSpec {
  MatrixFamily family;
  double h = 0.0;
  double z0 = 0.0;
  long iterations = 10000;
  int stride = 8;
  int z_samples = 8;
  std::optional<double> epsilon;  // when h was derived from epsilon
};

struct LyapunovEstimate {
  double value = 0.0;
  /// Log growth of each renormalization block, averaged over z samples.
  std::vector<double> block_log_norms;
  double standard_error = 0.0;
  long n_used = 0;
  std::vector<double> z_samples;
  std::vector<double> per_sample;
  std::vector<std::string> warnings;
};

/// theta = lim (1/N) log ||M(z + (N-1)h) ... M(z)||, averaged over z samples
/// z0 + k / K.
LyapunovEstimate cocycle_lyapunov(const CocycleSpec& spec);

/// Growth rate of -psi'' + (V(x - z) + W(epsilon x)) psi = E psi over [0, L]
/// in unit blocks.
LyapunovEstimate direct_lyapunov(const PeriodicPotential& v,
                                 const std::function<double(double)>& w, double epsilon,
                                 double energy, double z, double length, double tol = 1e-10);
LyapunovEstimate direct_lyapunov(const PeriodicPotential& v, const AnalyticPotential& w,
                                 double epsilon, double energy, double z, double length,
                                 double tol = 1e-10);

/// M0(z) = [[a0 + a1 u, b0 + b1 u], [conj(b0) + conj(b1) / u, conj(a0) + conj(a1) / u]],
/// u = exp(2 pi i z).
MatrixFamily model_matrix(cplx a0, cplx a1, cplx b0, cplx b1);

/// sup over real z of |det M0(z) - 1|, in closed form.
double model_det_deviation(cplx a0, cplx a1, cplx b0, cplx b1);

/// sup over a z grid of |det M(z) - 1|.
double sampled_det_deviation(const MatrixFamily& family, int samples = 4096);

struct HermanParameters {
  cplx lambda{2.0, 0.0};
  int n0 = 1;
  cplx alpha{0.5, 0.0};
  cplx beta{0.0, 0.0};
  double m_amp = 0.0;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
};

/// lambda e^{2 pi i n0 z} ([[1, beta], [0, alpha]] + M1(z)) with M1 a seeded
/// degree-3 trigonometric polynomial of sup norm m_amp.
MatrixFamily herman_family(const HermanParameters& p);

struct HermanCheck {
  double theta = 0.0;
  double bound = 0.0;  // log|lambda| - C m_amp
  double standard_error = 0.0;
  bool holds = false;
};

HermanCheck herman_bound_check(const HermanParameters& p, double c, long iterations = 20000,
                               int z_samples = 8);

double theta_to_Theta(double theta, double epsilon);

/// frac(2 pi / epsilon).
double h_from_epsilon(double epsilon);

/// Rational p/q with q < max_q within tol of h, if any.
std::optional<std::pair<long, long>> small_denominator(double h, long max_q = 20,
                                                       double tol = 1e-6);

enum class Conjugation { swap_sigma, s_twist };

MatrixFamily conjugate(const MatrixFamily& family, double h, Conjugation variant);

struct ConjugationReport {
  double theta = 0.0;
  double theta_conjugated = 0.0;
  double difference = 0.0;
  double combined_standard_error = 0.0;
};

ConjugationReport conjugation_invariance_check(const CocycleSpec& spec, Conjugation variant);

/// Uniform double in [0, 1) from the top 53 bits of a mt19937_64 draw.
double unit_uniform(std::uint64_t bits);

}  // namespace adiaspec
