#pragma once

// Probability measures on grids (densities) and atomic measures.

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "momlab/convexlab.hpp"
#include "momlab/grid.hpp"

namespace momlab {

inline constexpr double kDefaultMassTol = 1e-6;

class Density {
 public:
  /// Values must be finite and nonnegative with unit trapezoid mass.
  explicit Density(Field f, double mass_tol = kDefaultMassTol);
  /// Rescales a nonnegative field to unit mass.
  static Density normalized(const Field& f);

  const Field& field() const { return field_; }
  const Grid& grid() const { return field_.grid(); }
  double operator[](std::size_t k) const { return field_[k]; }
  std::size_t size() const { return field_.size(); }
  int dim() const { return field_.grid().dim(); }

  /// log of the normalizing constant when produced by gibbs(), else 0.
  double log_normalizer() const { return log_z_; }
  Density with_log_normalizer(double log_z) const;

 private:
  Field field_;
  double log_z_ = 0.0;
};

struct Atom {
  Point x;
  double w;
};

class AtomicMeasure {
 public:
  /// Weights > 0 summing to 1 within 1e−12, distinct locations. Atoms are
  /// stored sorted by location.
  AtomicMeasure(std::vector<Atom> atoms, int dim = 1);
  /// Merges equal locations and rescales weights to unit sum.
  static AtomicMeasure normalized(std::vector<Atom> atoms, int dim = 1);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int dim() const { return dim_; }

 private:
  std::vector<Atom> atoms_;
  int dim_;
};

using Measure = std::variant<Density, AtomicMeasure>;

int dim_of(const Measure& m);

/// e^{−(φ + α|x|²/2)}/Z on φ's grid; log Z is kept in the result.
Density gibbs(const Potential& phi, double alpha);

/// Pushforward of gibbs(ψ, α) through the cell slopes of ψ. Cells whose slopes
/// form plateaus (variation < plateau_tol over at least 3 cells) everywhere
/// yield atoms; otherwise cell masses are deposited linearly on `dual`
/// (default: slope range padded by 5%).
Measure moment_measure(const Potential& psi, double alpha,
                       const std::optional<Grid>& dual = std::nullopt,
                       double plateau_tol = 1e-6);

/// ∫|x|^p dμ.
double moments(const Measure& mu, double p);
/// ∫ρ log ρ with 0·log 0 = 0.
double entropy(const Density& rho);
Point barycenter(const Measure& mu);
/// Translate so that the barycenter is the origin. Densities are re-registered
/// on a shifted grid with unchanged values.
Measure center(const Measure& mu);
Density center(const Density& rho);

/// inf over unit θ of ∫|⟨θ,y⟩|dμ.
double theta(const Measure& mu);

/// ∫|μ − ν| on the union box at the finer spacing; values outside a box are 0.
double l1_distance(const Density& mu, const Density& nu);

struct TranslationFit {
  double distance;
  double x0;
  bool at_bound;  // optimum sits on the |x₀| ≤ 10% box-width limit
};

/// min over x₀ of ∫|ρ(x) − ρ̄(x + x₀)|dx, by a scan at grid step followed by
/// golden-section refinement. |x₀| is limited to `max_shift_fraction` of the
/// box width. 1D only.
TranslationFit l1_dist_mod_translation(const Density& rho, const Density& rho_bar,
                                       double max_shift_fraction = 0.1);

/// ∫φ dμ; atoms are evaluated by interpolation and must lie strictly inside
/// φ's box. Throws DomainError when μ charges {φ = +∞}.
double integrate_against(const Field& phi, const Measure& mu);

}  // namespace momlab
