#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adiaspec/hill.hpp"
#include "adiaspec/linalg.hpp"
#include "adiaspec/potential.hpp"

namespace adiaspec {

/// Real-analytic 2pi-periodic slow potential W with one maximum and one
/// minimum per period. The phase is shifted so that the maximum sits at 0.
class AnalyticPotential {
 public:
  AnalyticPotential(std::vector<Harmonic> terms, double strip_half_width);

  double operator()(double zeta) const;
  cplx operator()(cplx zeta) const;
  double derivative(double zeta) const;
  cplx derivative(cplx zeta) const;
  double second_derivative(double zeta) const;

  double w_plus() const noexcept { return w_plus_; }
  double w_minus() const noexcept { return w_minus_; }
  double zeta_star() const noexcept { return zeta_star_; }
  double phase_shift() const noexcept { return shift_; }
  double strip_half_width() const noexcept { return strip_; }
  std::span<const Harmonic> terms() const noexcept { return terms_; }

  /// Solution of W(zeta) = w on I- = [0, zeta*] (W decreasing).
  double inverse_minus(double w) const;
  /// Solution of W(zeta) = w on I+ = [zeta*, 2pi] (W increasing).
  double inverse_plus(double w) const;

  /// Upper bound of |W(zeta) - mean| on |Im zeta| <= y.
  double strip_bound(double y) const;
  double mean() const;

 private:
  std::vector<Harmonic> terms_;
  double strip_ = 0.0;
  double shift_ = 0.0;
  double zeta_star_ = 0.0;
  double w_plus_ = 0.0;
  double w_minus_ = 0.0;
};

/// Everything needed to evaluate the complex momentum.
struct AdiabaticModel {
  PeriodicPotential v;
  AnalyticPotential w;
  BandStructure bands;
  double ode_tol = kDefaultOdeTol;
};

struct Margin {
  std::string edge;  // e.g. "E3"
  double value = 0.0;
};

struct WindowReport {
  double energy = 0.0;
  double lower = 0.0;  // E - W+
  double upper = 0.0;  // E - W-
  int n = 1;
  int m = 0;
  bool a1_ok = false;
  bool a2_ok = false;
  bool a3_ok = false;
  std::vector<Margin> margins;

  bool all_ok() const { return a1_ok && a2_ok && a3_ok; }
  double min_margin() const;
};

WindowReport analyze_window(const AnalyticPotential& w, const BandStructure& bands, double energy,
                            int n, int m);

/// Energies for which the window test passes, and the energy maximizing the
/// smallest margin.
struct AdmissibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  double maximizer = 0.0;
  bool gaps_open = false;

  bool empty() const { return !gaps_open || !(lower < upper); }
  bool contains(double e) const { return !empty() && e > lower && e < upper; }
};

AdmissibleInterval admissible_interval(const AnalyticPotential& w, const BandStructure& bands,
                                       int n, int m);

struct StripReport {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Checks that no complex branch point of the momentum lies in |Im zeta| < Y.
StripReport check_strip(const AdiabaticModel& model, double energy);

struct BranchPoint {
  int index = 0;  // j in E_j
  int sign = 0;   // -1 on I-, +1 on I+
  double zeta = 0.0;
};

struct LabeledInterval {
  std::string label;
  int index = 0;  // band index for pre-bands, gap index for pre-gaps
  int sign = 0;   // -1, +1, or 0 for the two pre-gaps around 0 and zeta*
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double zeta) const { return zeta > lower && zeta < upper; }
  double length() const { return upper - lower; }
};

struct IsoEnergyGeometry {
  double energy = 0.0;
  int n = 1;
  int m = 0;
  double zeta_star = 0.0;
  std::vector<BranchPoint> branch_points;  // increasing zeta
  std::vector<LabeledInterval> pre_bands;
  std::vector<LabeledInterval> pre_gaps;

  double zeta(int j, int sign) const;
  const LabeledInterval& pre_band(const std::string& label) const;
  const LabeledInterval& pre_gap(const std::string& label) const;
};

IsoEnergyGeometry branch_points(const AnalyticPotential& w, const BandStructure& bands,
                                const WindowReport& report);

enum class ZetaSide { upper, lower, off_axis };

struct MomentumValue {
  cplx value{};
  bool degenerate = false;
};

/// kappa(zeta) = k_p(E - W(zeta)). On the real line `side` picks the +i0 or
/// -i0 boundary value, for which Im kappa >= 0 or <= 0 respectively.
MomentumValue complex_momentum(const AdiabaticModel& model, double energy, cplx zeta,
                               ZetaSide side = ZetaSide::upper);

/// Inverse of the real momentum on a pre-band, reduced to kappa in [0, pi]
/// and extended evenly and 2pi-periodically.
class RealBranch {
 public:
  static constexpr int kNodes = 512;

  RealBranch(const AdiabaticModel& model, const IsoEnergyGeometry& geom, const std::string& label);

  const std::string& label() const noexcept { return label_; }
  const LabeledInterval& interval() const noexcept { return interval_; }

  /// Exact inverse through the dispersion relation and the inverse of W.
  double evaluate(double kappa) const;
  /// Monotone cubic interpolation of the stored table.
  double interpolate(double kappa) const;
  /// kappa0(zeta) - pi (j - 1) for zeta in the pre-band.
  double reduced_momentum(double zeta) const;

  std::span<const double> kappa_nodes() const noexcept;
  std::span<const double> zeta_nodes() const noexcept;

  /// Maps any real kappa into [0, pi] by evenness and periodicity.
  static double reduce(double kappa);

 private:
  struct Table;

  AdiabaticModel model_;
  double energy_;
  std::string label_;
  LabeledInterval interval_;
  std::shared_ptr<const Table> table_;
};

enum class StokesFamily { kappa, kappa_minus_pi };

struct StokesOptions {
  double max_length = 5.0;
  double max_step = 1e-2;
  double tolerance = 1e-9;
  /// Stop radius around real branch points.
  double stop_radius = 1e-7;
};

struct StokesLine {
  enum class Stop { max_length, strip_boundary, branch_point };
  std::vector<cplx> points;
  std::vector<cplx> momenta;
  double length = 0.0;
  Stop stop = Stop::max_length;
};

/// Integrates dzeta/ds = direction * conj(f) / |f| with f = kappa or kappa - pi,
/// continuing kappa from its main-branch value at `start`.
StokesLine trace_stokes_line(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                             cplx start, StokesFamily family, int direction,
                             const StokesOptions& options = {});

/// Same, with an explicitly chosen initial momentum branch.
StokesLine trace_stokes_line(const AdiabaticModel& model, const IsoEnergyGeometry& geom,
                             cplx start, cplx start_momentum, StokesFamily family, int direction,
                             const StokesOptions& options = {});

struct PeriodIndex {
  int signature = 1;
  double index = 0.0;
};

PeriodIndex period_index(std::span<const double> crossings);

using Interval = std::pair<double, double>;

/// Sum of band intervals and the range [w_minus, w_plus], merged.
std::vector<Interval> sigma_set(const BandStructure& bands, double w_minus, double w_plus);
std::vector<Interval> sigma_set(std::vector<Interval> bands, double w_minus, double w_plus);

}  // namespace adiaspec
