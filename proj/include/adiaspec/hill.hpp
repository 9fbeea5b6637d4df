#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "adiaspec/linalg.hpp"
#include "adiaspec/potential.hpp"

namespace adiaspec {

inline constexpr double kDefaultOdeTol = 1e-12;
inline constexpr double kDefaultEdgeTol = 1e-10;

/// Matrix mapping (psi(x0), psi'(x0)) to (psi(x1), psi'(x1)) for
/// -psi'' + V psi = E psi.
struct FundamentalMatrix {
  Mat2c entries = Mat2c::Identity();
  double x0 = 0.0;
  double x1 = 1.0;
  cplx energy{};
  double tolerance_achieved = 0.0;
};

FundamentalMatrix fundamental_matrix(const PeriodicPotential& v, cplx energy, double x0, double x1,
                                     double tol = kDefaultOdeTol);

/// Trace of the period map.
cplx discriminant(const PeriodicPotential& v, cplx energy, double tol = kDefaultOdeTol);

/// dDelta/dE at real E by the complex-step rule.
double discriminant_derivative(const PeriodicPotential& v, double energy,
                               double tol = kDefaultOdeTol);

/// Where a real energy sits relative to the spectrum.
struct SpectralLocation {
  enum class Kind { below_spectrum, band, gap, above_ceiling };
  Kind kind;
  int index;  // band n or gap n (1-based); 0 for below_spectrum
};

/// Band edges E1 <= E2 <= E3 <= ... of the periodic operator below a ceiling.
struct BandStructure {
  std::vector<double> edges;
  std::vector<bool> gap_open;  // gap_open[k] refers to gap k+1 = (E_{2k+2}, E_{2k+3})
  double energy_ceiling = 0.0;
  double edge_tolerance = kDefaultEdgeTol;

  /// Edge E_j with 1-based j.
  double edge(int j) const { return edges.at(static_cast<std::size_t>(j - 1)); }
  bool has_edge(int j) const { return j >= 1 && j <= static_cast<int>(edges.size()); }

  /// Number of bands whose both edges lie below the ceiling.
  int complete_bands() const { return static_cast<int>(edges.size()) / 2; }

  /// Band n as [E_{2n-1}, E_{2n}]; the top of an unfinished band is the ceiling.
  std::pair<double, double> band(int n) const;

  /// Gap 0 is the half-line below the spectrum and always counts as open.
  bool gap_is_open(int n) const;

  SpectralLocation locate(double energy) const;

  /// Band intervals as listed, the last one truncated at the ceiling if needed.
  std::vector<std::pair<double, double>> band_intervals() const;
};

struct BandSearchOptions {
  double edge_tolerance = kDefaultEdgeTol;
  double ode_tolerance = kDefaultOdeTol;
  /// Grid points per Weyl spacing pi^2 (2n + 1) between consecutive bands.
  int points_per_spacing = 48;
};

BandStructure band_edges(const PeriodicPotential& v, double energy_ceiling,
                         double tol = kDefaultEdgeTol);
BandStructure band_edges(const PeriodicPotential& v, double energy_ceiling,
                         const BandSearchOptions& options);

/// Boundary side for energies on the real axis: E + i0 or E - i0.
enum class Side { upper, lower };

struct QuasiMomentumValue {
  cplx value{};
  cplx energy{};
  /// Main branch k_p: the branch with -i k_p(E + i0) > 0 below the spectrum.
  bool main_branch = true;
  /// Set when E is within the edge tolerance of a band edge.
  bool degenerate = false;
};

QuasiMomentumValue quasimomentum_main(const PeriodicPotential& v, const BandStructure& bands,
                                      cplx energy, Side side = Side::upper,
                                      double ode_tol = kDefaultOdeTol);

/// Solution of cos k = delta / 2 nearest to `previous`. `separation`
/// receives the distance from `previous` to the runner-up solution.
cplx nearest_quasimomentum_root(cplx delta, cplx previous, double* separation = nullptr);

/// Continues a branch of the quasi-momentum along the straight segment
/// [from, to] of the energy plane by nearest-root tracking of cos k = Delta / 2.
/// Crossing the real axis inside a gap (or below the spectrum) is refused.
cplx continue_quasimomentum(const PeriodicPotential& v, const BandStructure& bands, cplx from,
                            cplx k_from, cplx to, double ode_tol = kDefaultOdeTol);

/// Real energy in band n with k_p(E) = k, for k in [pi (n - 1), pi n].
double band_energy(const PeriodicPotential& v, const BandStructure& bands, int n, double k,
                   double ode_tol = kDefaultOdeTol);

struct BlochFloquet {
  cplx multiplier{};
  Vec2c direction = Vec2c::Zero();
};

/// Eigenpair of the period map. The eigenvalue of larger modulus is selected;
/// on the unit circle the one with non-negative imaginary part.
BlochFloquet bloch_floquet(const PeriodicPotential& v, cplx energy, double ode_tol = kDefaultOdeTol,
                           double degeneracy_tol = 1e-4);

}  // namespace adiaspec
