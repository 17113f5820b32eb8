#pragma once

// Discrete convex analysis on grids: Legendre conjugates, convex envelopes,
// finite-difference derivatives and the sup-convolution f_δ.

#include <cstddef>
#include <optional>
#include <vector>

#include "momlab/grid.hpp"

namespace momlab {

inline constexpr double kDefaultConvexityTol = 1e-9;

/// A Field that passes the discrete convexity test: second differences along
/// both axes and, in 2D, both diagonals are ≥ −tol·scale, where scale is the
/// magnitude of the values involved (at least 1). Finite nodes must form an
/// interval along every grid line.
class Potential {
 public:
  explicit Potential(Field f, double convexity_tol = kDefaultConvexityTol);

  const Field& field() const { return field_; }
  const Grid& grid() const { return field_.grid(); }
  double convexity_tol() const { return tol_; }
  double operator[](std::size_t k) const { return field_[k]; }
  std::size_t size() const { return field_.size(); }

  /// Same potential plus a constant.
  Potential plus(double c) const;

 private:
  struct Trusted {};
  Potential(Field f, double tol, Trusted) : field_(std::move(f)), tol_(tol) {}
  friend Potential make_trusted_potential(Field f, double tol);

  Field field_;
  double tol_;
};

/// Wraps a field that is convex by construction (e.g. a conjugate) without
/// re-running the test.
Potential make_trusted_potential(Field f, double tol = kDefaultConvexityTol);

/// Largest convexity violation (positive when non-convex) and its node; nullopt
/// when the field passes.
struct ConvexityViolation {
  std::size_t node;
  double violation;
};
std::optional<ConvexityViolation> find_convexity_violation(const Field& f,
                                                           double tol);

/// Conjugate values together with the primal node attaining each maximum.
struct Conjugate {
  Potential potential;
  std::vector<std::size_t> argmax;
};

/// Dual grid spanning the range of cell slopes of φ, padded by `pad` of the
/// range on each side, with the same node counts as φ's grid.
Grid default_dual_grid(const Potential& phi, double pad = 0.05);

/// φ*(y) = max over finite nodes x of ⟨x,y⟩ − φ(x), at every node of `dual`.
Conjugate legendre_transform(const Potential& phi, const Grid& dual);
Conjugate legendre_transform(const Potential& phi);

/// φ*(y) at a single point by a direct maximum over the finite nodes.
double conjugate_at(const Potential& phi, const Point& y);

/// Convex envelope restricted to the grid; +∞ outside the hull of the finite
/// nodes.
Potential convexify(const Field& f, double convexity_tol = kDefaultConvexityTol);

struct Gradient {
  std::vector<Field> components;  // one per axis
  std::vector<bool> one_sided;    // node used a one-sided difference
  std::vector<bool> defined;      // false at +∞ nodes (component value 0)
};

/// Central differences at interior finite nodes, one-sided at the edge of the
/// effective domain.
Gradient gradient(const Field& f);
inline Gradient gradient(const Potential& phi) { return gradient(phi.field()); }

struct Hessian {
  /// 1D: {φ''}. 2D: {xx, xy, yy}, projected onto positive semidefinite.
  std::vector<Field> entries;
  std::size_t clamp_warnings = 0;
};

/// Central second differences; negative curvature is clamped to zero and
/// values below −tol are counted in `clamp_warnings`. Edge nodes copy their
/// inner neighbour.
Hessian second_derivative(const Potential& phi);

struct SupConvolutionOptions {
  /// Restrict offsets to |h| ≤ window_factor·δ·Lip(f)/modulus(φ).
  bool windowed = false;
  double window_factor = 10.0;
};

/// f_δ(z) = max over grid offsets h of δf(z+h) − [½φ(z+h) + ½φ(z−h) − φ(z)].
/// Requires 2δf − φ concave along grid lines; otherwise throws ConcavityError
/// naming the worst node.
Field sup_convolution_fdelta(const Field& f, const Potential& phi, double delta,
                             const SupConvolutionOptions& opts = {});

/// Worst concavity violation of 2δf − φ, nullopt when concave within tol.
std::optional<ConvexityViolation> find_concavity_violation(
    const Field& f, const Potential& phi, double delta, double tol);

/// Minimum of φ'' over the finite nodes at distance ≥ margin·width from the
/// edges of the effective domain. 1D only.
double strong_convexity_modulus(const Potential& phi, double margin = 0.1);

}  // namespace momlab
