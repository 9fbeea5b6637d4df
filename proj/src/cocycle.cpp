#include "adiaspec/cocycle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "adiaspec/error.hpp"
#include "adiaspec/propagator.hpp"

namespace adiaspec {

namespace {

constexpr double kSeFloor = 1e-14;
constexpr int kBatches = 10;

double frac(double x) { return x - std::floor(x); }

// Largest singular value of a 2x2 matrix in closed form.
template <class M>
double norm2(const M& m) {
  const double f = m.squaredNorm();
  const double d = std::abs(m.determinant());
  return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * d * d))));
}

// Standard error of the mean of batch rates.
double batch_standard_error(const std::vector<double>& rates) {
  if (rates.size() < 2) return kSeFloor;
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / rates.size();
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rates.size() - 1);
  return std::max(kSeFloor, std::sqrt(var / rates.size()));
}

// Splits per-block log growths into contiguous batches of iterations.
void append_batch_rates(const std::vector<double>& blocks, const std::vector<long>& lengths,
                        std::vector<double>& rates) {
  const std::size_t nb = blocks.size();
  const std::size_t batches = std::min<std::size_t>(kBatches, nb);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * nb / batches;
    const std::size_t hi = (b + 1) * nb / batches;
    double sum = 0.0;
    long len = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum += blocks[i];
      len += lengths[i];
    }
    if (len > 0) rates.push_back(sum / len);
  }
}

}  // namespace

MatrixFamily::MatrixFamily(FamilyKind kind, Evaluator evaluator, std::vector<cplx> parameters)
    : kind_(kind), eval_(std::move(evaluator)), params_(std::move(parameters)) {
  require(static_cast<bool>(eval_), ErrorKind::invalid_input, "matrix family needs an evaluator");
}

MatrixFamily MatrixFamily::table(std::vector<Mat2c> samples) {
  require(!samples.empty(), ErrorKind::invalid_input, "matrix table is empty");
  for (const auto& m : samples)
    require(m.allFinite(), ErrorKind::invalid_input, "matrix table has non-finite entries");
  const auto n = static_cast<long>(samples.size());
  return MatrixFamily(FamilyKind::user_table, [s = std::move(samples), n](double z) {
    const long k = static_cast<long>(std::floor(frac(z) * n)) % n;
    return s[static_cast<std::size_t>(k)];
  });
}

// ---------------------------------------------------------------------------

LyapunovEstimate cocycle_lyapunov(const CocycleSpec& spec) {
  require(spec.iterations >= 1, ErrorKind::invalid_input, "need N >= 1");
  require(spec.stride >= 1, ErrorKind::invalid_input, "renormalization stride must be >= 1");
  require(spec.z_samples >= 1, ErrorKind::invalid_input, "need at least one z sample");
  require(std::isfinite(spec.h) && std::isfinite(spec.z0), ErrorKind::invalid_input,
          "h and z0 must be finite");

  LyapunovEstimate out;
  out.n_used = spec.iterations;
  if (auto pq = small_denominator(frac(spec.h)))
    out.warnings.push_back("h is within 1e-6 of " + std::to_string(pq->first) + "/" +
                           std::to_string(pq->second) + "; the limit may depend on z");

  const long n = spec.iterations;
  const long nblocks = (n + spec.stride - 1) / spec.stride;
  std::vector<double> block_sum(static_cast<std::size_t>(nblocks), 0.0);
  std::vector<long> lengths(static_cast<std::size_t>(nblocks), spec.stride);
  lengths.back() = n - (nblocks - 1) * spec.stride;
  std::vector<double> rates;

  for (int k = 0; k < spec.z_samples; ++k) {
    const double z = spec.z0 + static_cast<double>(k) / spec.z_samples;
    out.z_samples.push_back(z);
    std::vector<double> blocks(static_cast<std::size_t>(nblocks), 0.0);
    Mat2c p = Mat2c::Identity();
    for (long i = 0; i < n; ++i) {
      const Mat2c m = spec.family(z + frac(static_cast<double>(i) * spec.h));
      if (!(std::abs(m.determinant()) >= 1e-300))
        fail(ErrorKind::degeneracy, "singular cocycle matrix at step " + std::to_string(i));
      p = m * p;
      if ((i + 1) % spec.stride == 0 || i + 1 == n) {
        const double s = norm2(p);
        require(std::isfinite(s) && s > 0.0, ErrorKind::degeneracy, "cocycle product degenerated");
        p /= s;
        blocks[static_cast<std::size_t>(i / spec.stride)] = std::log(s);
      }
    }
    double total = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      total += blocks[b];
      block_sum[b] += blocks[b];
    }
    out.per_sample.push_back(total / n);
    append_batch_rates(blocks, lengths, rates);
  }

  out.block_log_norms.resize(block_sum.size());
  double total = 0.0;
  for (std::size_t b = 0; b < block_sum.size(); ++b) {
    out.block_log_norms[b] = block_sum[b] / spec.z_samples;
    total += out.block_log_norms[b];
  }
  out.value = total / n;
  out.standard_error = batch_standard_error(rates);
  return out;
}

// ---------------------------------------------------------------------------

LyapunovEstimate direct_lyapunov(const PeriodicPotential& v, const std::function<double(double)>& w,
                                 double epsilon, double energy, double z, double length,
                                 double tol) {
  require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::invalid_input,
          "epsilon must be positive");
  require(std::isfinite(energy) && std::isfinite(z) && std::isfinite(length),
          ErrorKind::invalid_input, "energy, z and L must be finite");
  require(tol > 0.0, ErrorKind::invalid_input, "tolerance must be positive");
  const long blocks = static_cast<long>(std::floor(length));
  if (blocks < 10)
    fail(ErrorKind::insufficient_length, "L must cover at least 10 unit blocks");

  LyapunovEstimate out;
  out.n_used = blocks;
  out.z_samples = {z};
  if (length < 50.0 * two_pi / epsilon)
    out.warnings.push_back("L covers fewer than 50 periods of W");

  auto q = [&](double x) { return v(x - z) + w(epsilon * x) - energy; };
  StepHint hint;
  Mat2 p = Mat2::Identity();
  out.block_log_norms.reserve(static_cast<std::size_t>(blocks));
  double total = 0.0;
  for (long b = 0; b < blocks; ++b) {
    const auto prop = propagate<double>(q, double(b), double(b + 1), tol, hint);
    p = prop.matrix * p;
    const double s = norm2(p);
    require(std::isfinite(s) && s > 0.0, ErrorKind::convergence_failure,
            "transfer matrix product degenerated");
    p /= s;
    out.block_log_norms.push_back(std::log(s));
    total += std::log(s);
  }
  out.value = total / blocks;
  out.per_sample = {out.value};
  std::vector<double> rates;
  append_batch_rates(out.block_log_norms, std::vector<long>(out.block_log_norms.size(), 1), rates);
  out.standard_error = batch_standard_error(rates);
  return out;
}

LyapunovEstimate direct_lyapunov(const PeriodicPotential& v, const AnalyticPotential& w,
                                 double epsilon, double energy, double z, double length,
                                 double tol) {
  return direct_lyapunov(v, [&](double zeta) { return w(zeta); }, epsilon, energy, z, length, tol);
}

// ---------------------------------------------------------------------------

MatrixFamily model_matrix(cplx a0, cplx a1, cplx b0, cplx b1) {
  return MatrixFamily(
      FamilyKind::model_m0,
      [=](double z) {
        const cplx u = std::polar(1.0, two_pi * z);
        Mat2c m;
        m << a0 + a1 * u, b0 + b1 * u, std::conj(b0) + std::conj(b1) / u,
            std::conj(a0) + std::conj(a1) / u;
        return m;
      },
      {a0, a1, b0, b1});
}

double model_det_deviation(cplx a0, cplx a1, cplx b0, cplx b1) {
  // det M0 = c + 2 Re(d u)
  const double c = std::norm(a0) + std::norm(a1) - std::norm(b0) - std::norm(b1);
  const cplx d = a1 * std::conj(a0) - b1 * std::conj(b0);
  return std::abs(c - 1.0) + 2.0 * std::abs(d);
}

double sampled_det_deviation(const MatrixFamily& family, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
    worst = std::max(worst, std::abs(family(double(i) / samples).determinant() - 1.0));
  return worst;
}

// ---------------------------------------------------------------------------

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

MatrixFamily herman_family(const HermanParameters& p) {
  require(std::abs(p.alpha) < 1.0, ErrorKind::invalid_input, "Herman family needs |alpha| < 1");
  require(std::isfinite(p.m_amp) && p.m_amp >= 0.0, ErrorKind::invalid_input,
          "perturbation size must be non-negative");
  require(is_finite(p.lambda) && is_finite(p.beta) && is_finite(p.alpha), ErrorKind::invalid_input,
          "Herman parameters must be finite");

  constexpr int degree = 3;
  std::mt19937_64 rng(p.seed);
  std::array<Mat2c, 2 * degree + 1> coef;
  for (auto& c : coef)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double re = 2.0 * unit_uniform(rng()) - 1.0;
        const double im = 2.0 * unit_uniform(rng()) - 1.0;
        c(i, j) = cplx(re, im);
      }
  auto raw = [coef](double z) {
    Mat2c m = Mat2c::Zero();
    for (int k = -degree; k <= degree; ++k) m += coef[k + degree] * std::polar(1.0, two_pi * k * z);
    return m;
  };
  // Sup norm: grid search, then golden-section refinement around the best node.
  constexpr int grid = 4096;
  int best = 0;
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double val = operator_norm(raw(double(i) / grid));
    if (val > sup) {
      sup = val;
      best = i;
    }
  }
  double a = double(best - 1) / grid, b = double(best + 1) / grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (operator_norm(raw(c)) > operator_norm(raw(d)))
      b = d;
    else
      a = c;
  }
  sup = std::max(sup, operator_norm(raw(0.5 * (a + b))));
  const double scale = p.m_amp > 0.0 ? p.m_amp / sup : 0.0;

  Mat2c base;
  base << 1.0, p.beta, 0.0, p.alpha;
  const cplx lambda = p.lambda;
  const int n0 = p.n0;
  return MatrixFamily(
      FamilyKind::herman_test,
      [=](double z) {
        const cplx phase = lambda * std::polar(1.0, two_pi * n0 * z);
        if (scale == 0.0) return Mat2c(phase * base);
        return Mat2c(phase * (base + scale * raw(z)));
      },
      {p.lambda, cplx(p.n0), p.alpha, p.beta, cplx(p.m_amp), cplx(p.epsilon),
       cplx(static_cast<double>(p.seed))});
}

HermanCheck herman_bound_check(const HermanParameters& p, double c, long iterations,
                               int z_samples) {
  CocycleSpec spec{herman_family(p), h_from_epsilon(p.epsilon), 0.0, iterations, 8, z_samples,
                   p.epsilon};
  const auto est = cocycle_lyapunov(spec);
  HermanCheck out;
  out.theta = est.value;
  out.standard_error = est.standard_error;
  out.bound = std::log(std::abs(p.lambda)) - c * p.m_amp;
  out.holds = out.theta > out.bound;
  return out;
}

double theta_to_Theta(double theta, double epsilon) {
  require(epsilon > 0.0, ErrorKind::invalid_input, "epsilon must be positive");
  return epsilon / two_pi * theta;
}

double h_from_epsilon(double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::invalid_input,
          "epsilon must be positive");
  return frac(two_pi / epsilon);
}

std::optional<std::pair<long, long>> small_denominator(double h, long max_q, double tol) {
  for (long q = 1; q < max_q; ++q) {
    const long p = std::lround(h * q);
    if (std::abs(h - double(p) / q) < tol) return std::make_pair(p, q);
  }
  return std::nullopt;
}

MatrixFamily conjugate(const MatrixFamily& family, double h, Conjugation variant) {
  if (variant == Conjugation::swap_sigma) {
    return MatrixFamily(family.kind(), [family](double z) {
      Mat2c s;
      s << 0.0, 1.0, 1.0, 0.0;
      return Mat2c(s * family(z) * s);
    }, family.parameters());
  }
  return MatrixFamily(family.kind(), [family, h](double z) {
    // S(z) = diag(e^{i pi z}, e^{-i pi z}); S^{-1}(z + h) M(z) S(z)
    const cplx a = std::polar(1.0, pi * z);
    const cplx b = std::polar(1.0, pi * (z + h));
    Mat2c m = family(z);
    m(0, 0) *= a / b;
    m(0, 1) *= 1.0 / (a * b);
    m(1, 0) *= a * b;
    m(1, 1) *= b / a;
    return m;
  }, family.parameters());
}

ConjugationReport conjugation_invariance_check(const CocycleSpec& spec, Conjugation variant) {
  CocycleSpec other = spec;
  other.family = conjugate(spec.family, spec.h, variant);
  const auto a = cocycle_lyapunov(spec);
  const auto b = cocycle_lyapunov(other);
  ConjugationReport out;
  out.theta = a.value;
  out.theta_conjugated = b.value;
  out.difference = std::abs(a.value - b.value);
  out.combined_standard_error = std::hypot(a.standard_error, b.standard_error);
  return out;
}

}  // namespace adiaspec
