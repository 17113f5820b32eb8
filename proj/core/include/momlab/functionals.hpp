#pragma once

// The dual functionals J and E, the Brascamp-Lieb deficit and its optimizer
// manifold, Prékopa-Leindler deficits, and variations of J.

#include <cstddef>
#include <optional>

#include "momlab/convexlab.hpp"
#include "momlab/measures.hpp"

namespace momlab {

/// Default tolerance attached to reports: 10·h + 1e−8.
double grid_tolerance(const Grid& g);

/// J(φ) = log ∫e^{−(φ* + α|x|²/2)} − ∫φ dμ. The conjugate is taken on `dual`
/// (default: slope range of φ padded by 5%).
double j_functional(const Potential& phi, const Measure& mu, double alpha,
                    const std::optional<Grid>& dual = std::nullopt);

/// J evaluated at φ = ψ*, using ψ** = ψ: log ∫e^{−(ψ + α|x|²/2)} − ∫ψ* dμ.
/// For atomic μ the conjugate is evaluated exactly at the atoms and `dual` is
/// unused.
double j_functional_dual(const Potential& psi, const Measure& mu, double alpha,
                         const std::optional<Grid>& dual = std::nullopt);

/// E(ρ) = ∫ρ log ρ + T(ρ, μ) + (α/2)M₂(ρ). 1D.
double e_functional(const Density& rho, const Measure& mu, double alpha);

/// J(φ) + E(ρ). Both J(φ) and −E(ρ) are bounded by the common value
/// sup J = −inf E, so the gap is ≥ 0 when φ is optimal, ≤ 0 when ρ is optimal
/// and zero at optimal pairs.
double duality_gap(const Potential& phi, const Density& rho, const Measure& mu,
                   double alpha, const std::optional<Grid>& dual = std::nullopt);

struct DeficitReport {
  double deficit = 0.0;         // dirichlet − variance, or +∞
  double dirichlet_term = 0.0;  // ∫⟨(D²φ)^{-1}∇f, ∇f⟩ dρ
  double variance_term = 0.0;   // Var_ρ(f)
  std::size_t clamp_warnings = 0;
  double tolerance = 0.0;
};

/// Brascamp-Lieb deficit of f under ρ = gibbs(φ, α). f is resampled onto φ's
/// grid when needed. Nodes with vanishing Hessian contribute 0 when
/// |∇f| < grad_tol and +∞ otherwise.
DeficitReport bl_deficit(const Field& f, const Potential& phi, double alpha = 0.0,
                         double grad_tol = 1e-10);

struct ManifoldDistance {
  double distance;  // ‖f − aφ′ − b‖_{L¹(ρ_φ)}
  double a;
  double b;         // E_{ρ_φ} f
};

/// Distance from f to {aφ′ + b} in L¹(ρ_φ) with b = E_{ρ_φ} f. 1D.
ManifoldDistance dist_to_bl_optimizers(const Field& f, const Potential& phi);

struct PrekopaCheck {
  bool holds = true;
  double worst_violation = 0.0;  // max of f(x)^s g(y)^{1−s} − h(sx+(1−s)y)
  Point x{0.0, 0.0};
  Point y{0.0, 0.0};
};

/// Brute force over node pairs (x, y) of f's and g's grids, with h
/// interpolated at sx + (1−s)y (0 outside h's box). When max_nodes_per_axis is
/// nonzero the nodes are subsampled with a uniform stride.
PrekopaCheck prekopa_condition_check(const Field& f, const Field& g, const Field& h,
                                     double s, double tol = 1e-12,
                                     std::size_t max_nodes_per_axis = 0);

/// ∫h / ((∫f)^s (∫g)^{1−s}) − 1. When `check` is set the Prékopa condition is
/// verified first (subsampled to `max_nodes_per_axis`) and PreconditionError
/// is raised on failure.
double pl_deficit(const Field& f, const Field& g, const Field& h, double s,
                  bool check = true, std::size_t max_nodes_per_axis = 401);

struct BlTriple {
  Field u;          // e^{2δf − φ}
  Field v;          // e^{−φ}
  Field w;          // e^{f_δ − φ}
  Field f_delta;
  Potential phi;    // φ shifted so that ∫e^{−φ} = 1
  PrekopaCheck check;
};

/// Near-equality triple for the Prékopa-Leindler inequality built from the
/// sup-convolution f_δ. Throws ConcavityError carrying the largest admissible
/// δ when 2δf − φ is not concave.
BlTriple bl_triple(const Field& f, const Potential& phi, double delta,
                   const SupConvolutionOptions& opts = {},
                   std::size_t check_nodes_per_axis = 401);

/// dJ/dt at t = 0 along φ + tv: ∫v d(μ_{φ*,α} − μ), where the moment measure
/// is the pushforward of ρ_{φ*,α} through the conjugate's argmax map.
double variation_first(const Potential& phi, const Field& v, const Measure& mu,
                       double alpha, const std::optional<Grid>& dual = std::nullopt);

/// d²J/dt² at t = 0: −δ_BL(v∘∇φ*) under the α-weighted Gibbs measure of φ*,
/// with the inverse Hessian of φ*. Exact for α = 0, approximate for α > 0.
double variation_second(const Potential& phi, const Field& v, double alpha,
                        const std::optional<Grid>& dual = std::nullopt);

struct VariationReport {
  double first = 0.0;
  double second = 0.0;
  double fd_first = 0.0;
  double fd_second = 0.0;
  double step_first = 0.0;
  double step_second = 0.0;
};

/// Both variations with centered finite differences of J as cross-checks.
VariationReport variation_report(const Potential& phi, const Field& v, const Measure& mu,
                                 double alpha, const Grid& dual, double step_first = 1e-4,
                                 double step_second = 1e-2);

struct AffineDistance {
  double distance = 0.0;  // inf over a, b of ‖(φ − φ̄) − (a·x + b)‖ in L¹(μ_λ)
  double lambda = 0.0;    // Gauss-Legendre node in (0, ½) attaining it
};
/// μ_λ is the moment measure of (φ̄ + λ(φ − φ̄))*; the distance is minimized
/// over the Gauss-Legendre nodes λ < ½. 1D.
AffineDistance dist_mod_affine(const Potential& phi, const Potential& phi_bar,
                               std::size_t t_nodes = 16,
                               const std::optional<Grid>& dual = std::nullopt);

struct BackboneReport {
  double lhs = 0.0;             // J(φ) − J(φ̄)
  double rhs = 0.0;             // −∫₀¹(1−t)δ_BL(t) dt
  double first_variation = 0.0; // dJ/dt at φ̄ along φ − φ̄
  double best_lambda = 0.0;     // node in (0, ½) with the smallest affine distance
  double best_lambda_distance = 0.0;
  double tolerance = 0.0;
};

/// Second-order Taylor identity along φ_t = φ̄ + t(φ − φ̄), α = 0. The
/// conjugate of φ_t is recomputed at each Gauss-Legendre node.
BackboneReport backbone_gap(const Potential& phi_bar, const Potential& phi, const Measure& mu,
                            std::size_t t_nodes = 16,
                            const std::optional<Grid>& dual = std::nullopt);

}  // namespace momlab
