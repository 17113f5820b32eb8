#pragma once

// Moment-measure solver in 1D, the regularization path, and regularity probes.

#include <cstddef>
#include <vector>

#include "momlab/convexlab.hpp"
#include "momlab/measures.hpp"

namespace momlab {

enum class SolverBackend {
  /// Damped monotone rearrangement of the cell slopes.
  fixed_point,
  /// Gradient ascent on J over the cell slopes, for cross-validation.
  gradient_ascent,
};

struct SolverOptions {
  SolverBackend backend = SolverBackend::fixed_point;
  /// Fixed point: weight of the new slopes. Gradient ascent: step length in
  /// the L²(dx) metric on ψ'.
  double damping = 0.5;
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  /// Consecutive residual increases treated as divergence.
  std::size_t divergence_window = 50;
};

struct SolveReport {
  Potential psi;
  Density rho;
  double alpha = 0.0;
  std::size_t iterations = 0;
  /// Σ m_i |s_i − T_i| over cells: the transport cost of the coupling that
  /// sends each cell's slope to its target quantile. Bounds W₁ from above.
  double residual = 0.0;
  /// W₁ between the deposited moment measure and μ (diagnostic).
  double w1_deposited = 0.0;
  double j_value = 0.0;
  double e_value = 0.0;
  double gap = 0.0;
  double gap_tolerance = 0.0;
  bool residual_ok = false;
  bool gap_ok = false;
  bool converged = false;
  double m2_rho = 0.0;
  double barycenter = 0.0;
  std::size_t j_ascent_violations = 0;
  std::vector<double> residual_trace;
};

/// Damped monotone-rearrangement fixed point on the cell slopes of ψ:
/// s ← (1−d)s + d·F_μ^{-1}(F_ρ(cell)), ρ = gibbs(ψ, α). The gradient-ascent
/// backend instead moves s_i by d·(μ(s_i, ∞) − ρ(x_i, ∞)), which is ∂J/∂s_i
/// divided by the cell width. ψ is gauged so that
/// ∫e^{−ψ−α|x|²/2} = 1 and, for α = 0, re-centered so that ρ has barycenter 0.
SolveReport solve_moment_measure(const Measure& mu, double alpha, const Grid& grid,
                                 const SolverOptions& opts = {});

struct RateSample {
  double alpha;
  double distance;
  double shift;
  bool shift_at_bound;
};

struct RateFit {
  std::vector<RateSample> samples;  // α strictly decreasing
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool slope_defined = false;
  double c_hat = 0.0;     // dist/α^{1/2} at the largest α
  bool bound_holds = false;  // every dist ≤ 4·c_hat·α^{1/2}
};

inline constexpr double kDefaultAlphaFloor = 1e-4;

/// Solves at α = 0 and every α in `alphas`, measures l1_dist_mod_translation
/// between ρ_α and ρ₀, and fits log dist against log α.
RateFit regularization_path(const Measure& mu, std::vector<double> alphas, const Grid& grid,
                            const SolverOptions& opts = {},
                            double alpha_floor = kDefaultAlphaFloor);

struct CaffarelliRow {
  std::size_t k;
  double partial_sum;    // Σ_{i=1}^k (−1)^{i+1}/2^i
  double closed_form;    // (1 − (−1/2)^k)/3
  double alpha_exponent; // 1/2^k
};

std::vector<CaffarelliRow> caffarelli_exponents(std::size_t k);

struct RegularityProbe {
  double modulus = 0.0;
  double lambda_third = 0.0;  // Λ^{−1/3}
  double lambda_one = 0.0;    // Λ^{−1}
  double tolerance = 0.0;
  bool pass_third = false;
  bool pass_one = false;
  double max_curvature = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Checks V'' ≤ Λ on the interior window, solves the moment-measure
/// representation of the centered gibbs(V, 0) on V's grid and compares the
/// strong-convexity modulus of ψ, taken where ρ leaves at least 1e−9 of mass
/// on each side, with Λ^{−1/3} and Λ^{−1}.
RegularityProbe regularity_probe(const Potential& v, double lambda,
                                 const SolverOptions& opts = {}, double margin = 0.1);

struct MomentRow {
  std::size_t k;
  double v2k;        // ∫|x − x*|^{2k} e^{−ψ}, ψ normalized
  double ratio;      // (d + 2k − 2)/λ
  double bound;      // ratio · V(2k − 2)
  double closed_bound;  // λ^{−k} Π_{i<k}(d + 2i)
  bool holds;
};

/// Moment recursion for a λ-strongly convex ψ in 1D; x* is the grid minimizer
/// refined by a parabola through its neighbours.
std::vector<MomentRow> p_moment_bound_check(const Potential& psi, double lambda, std::size_t k_max,
                                            double margin = 0.1, double rel_tol = 1e-6);

}  // namespace momlab
