#pragma once

// One-dimensional optimal transport through quantile functions.

#include <cstddef>
#include <vector>

#include "momlab/measures.hpp"

namespace momlab {

inline constexpr std::size_t kDefaultLevels = 4096;

/// Generalized inverse of a 1D CDF, F^{-1}(t) = inf{x : F(x) ≥ t}. Densities
/// are inverted exactly on their piecewise-quadratic trapezoid CDF; levels
/// above ½ are inverted from the right tail to keep both tails accurate.
class QuantileFunction {
 public:
  explicit QuantileFunction(const Measure& mu);
  double operator()(double t) const;
  /// F^{-1}(t) with the level given by its distance to 1, r = 1 − t; keeps
  /// precision for levels close to 1.
  double from_right(double r) const;
  /// μ((x, ∞)), computed from the right to keep precision in the upper tail.
  double survival(double x) const;

 private:
  double lower(double t) const;
  double upper_tail(double r) const;

  bool atomic_ = false;
  std::vector<double> x_;      // nodes or atom locations
  std::vector<double> rho_;    // node values (densities)
  std::vector<double> left_;   // cumulative mass up to node / atom i
  std::vector<double> right_;  // mass from node / atom i to the right end
  double h_ = 0.0;
  double total_ = 1.0;
};

/// Quantile values at the midpoint levels t_j = (j + ½)/L.
struct QuantileRep {
  std::vector<double> levels;
  std::vector<double> values;
};

QuantileRep quantile_rep(const Measure& mu, std::size_t levels = kDefaultLevels);

double wasserstein_1d(const Measure& mu, const Measure& nu, double p,
                      std::size_t levels = kDefaultLevels);

/// T(ρ, μ) = sup over couplings of ∫xy; computed as the level-grid mean of
/// F_ρ^{-1}·F_μ^{-1}, which equals (M₂ + M₂′)/2 − W₂²/2 with every term on
/// the same level grid.
double max_correlation(const Measure& rho, const Measure& mu,
                       std::size_t levels = kDefaultLevels);

/// Displacement interpolation (1−t)F₀^{-1} + tF₁^{-1} as equal-weight atoms on
/// the level grid; coincident locations are merged.
AtomicMeasure geodesic(const Measure& mu0, const Measure& mu1, double t,
                       std::size_t levels = kDefaultLevels);

/// (1−t)M₂(μ₀) + tM₂(μ₁) − ½t(1−t)W₂² − M₂(μ_t) on the level grid.
double m2_geodesic_gap(const Measure& mu0, const Measure& mu1, double t,
                       std::size_t levels = kDefaultLevels);

struct CouplingBound {
  double bound = 0.0;    // upper bound on W_q
  double epsilon = 0.0;  // ‖μ − ν‖₁
  double radius = 0.0;   // optimizing R
};

/// Minimizes (2R)^q α + 2^{q−1}R^{q−p}(M_p(μ) + M_p(ν)) over R > 0 with
/// α = ‖μ − ν‖₁/2 and returns the q-th root of the minimum.
CouplingBound l1_moment_coupling_bound(const Density& mu, const Density& nu,
                                       double p, double q);

}  // namespace momlab
