#include "momlab/transport.hpp"

#include <algorithm>
#include <cmath>

#include "momlab/errors.hpp"
#include "momlab/optimize.hpp"

namespace momlab {
namespace {

// Smallest root in [0, 1] of a·u² + b·u = r with r ≥ 0, b ≥ 0.
double solve_cell(double a, double b, double r) {
  if (r <= 0.0) return 0.0;
  const double disc = std::max(0.0, b * b + 4.0 * a * r);
  const double den = b + std::sqrt(disc);
  if (den <= 0.0) return 1.0;
  return std::clamp(2.0 * r / den, 0.0, 1.0);
}

void check_1d(const Measure& mu) {
  if (dim_of(mu) != 1) throw UnsupportedDimensionError("1D optimal transport only");
}

}  // namespace

QuantileFunction::QuantileFunction(const Measure& mu) {
  check_1d(mu);
  if (const auto* d = std::get_if<Density>(&mu)) {
    const Axis& ax = d->grid().axis(0);
    const std::size_t n = ax.n;
    h_ = ax.spacing();
    x_.resize(n);
    rho_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x_[i] = ax.node(i);
      rho_[i] = (*d)[i];
    }
    left_.assign(n, 0.0);
    right_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      left_[i] = left_[i - 1] + 0.5 * h_ * (rho_[i - 1] + rho_[i]);
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      right_[i] = right_[i + 1] + 0.5 * h_ * (rho_[i] + rho_[i + 1]);
    }
    total_ = left_.back();
    if (!(total_ > 0.0)) throw NormalizationError("measure has zero mass");
    return;
  }
  atomic_ = true;
  const auto& atoms = std::get<AtomicMeasure>(mu).atoms();
  const std::size_t n = atoms.size();
  x_.resize(n);
  left_.assign(n, 0.0);
  right_.assign(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = atoms[i].x[0];
    acc += atoms[i].w;
    left_[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += atoms[i].w;
    right_[i] = acc;
  }
  total_ = left_.back();
}

double QuantileFunction::operator()(double t) const {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return t <= 0.5 ? lower(t) : upper_tail(1.0 - t);
}

double QuantileFunction::from_right(double r) const {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return r < 0.5 ? upper_tail(r) : lower(1.0 - r);
}

double QuantileFunction::survival(double x) const {
  const std::size_t n = x_.size();
  if (atomic_) {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.end()) return 0.0;
    return right_[static_cast<std::size_t>(it - x_.begin())] / total_;
  }
  if (x < x_.front()) return 1.0;
  if (x >= x_.back()) return 0.0;
  const auto i = std::min(static_cast<std::size_t>((x - x_.front()) / h_), n - 2);
  // Mass of the linear density on [x, x_{i+1}].
  const double u = std::clamp((x - x_[i]) / h_, 0.0, 1.0);
  const double rx = rho_[i] + u * (rho_[i + 1] - rho_[i]);
  const double part = 0.5 * h_ * (1.0 - u) * (rx + rho_[i + 1]);
  return (right_[i + 1] + part) / total_;
}

double QuantileFunction::lower(double t) const {
  const double tau = t * total_;
  if (atomic_) {
    const auto it = std::lower_bound(left_.begin(), left_.end(), tau);
    const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - left_.begin(), static_cast<std::ptrdiff_t>(x_.size()) - 1));
    return x_[i];
  }
  // First node whose cumulative mass reaches tau; the answer lies in the cell
  // just before it.
  const auto it = std::lower_bound(left_.begin() + 1, left_.end(), tau);
  const auto i1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - left_.begin(), static_cast<std::ptrdiff_t>(x_.size()) - 1));
  const std::size_t i = i1 - 1;
  const double a = 0.5 * h_ * (rho_[i + 1] - rho_[i]);
  const double b = h_ * rho_[i];
  return x_[i] + h_ * solve_cell(a, b, tau - left_[i]);
}

double QuantileFunction::upper_tail(double r_level) const {
  const double tau = r_level * total_;
  const std::size_t n = x_.size();
  if (atomic_) {
    // First atom k whose strict right mass right_[k+1] is ≤ tau.
    for (std::size_t lo = 0, hi = n - 1;;) {
      if (lo == hi) return x_[lo];
      const std::size_t mid = (lo + hi) / 2;
      const double strict = mid + 1 < n ? right_[mid + 1] : 0.0;
      if (strict <= tau) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
  }
  // Smallest cell i with right_[i+1] ≤ tau; right_ is nonincreasing.
  std::size_t lo = 0, hi = n - 2;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (right_[mid + 1] <= tau) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const std::size_t i = lo;
  // Mass of [x, x_{i+1}] with x = x_{i+1} − v·h.
  const double a = 0.5 * h_ * (rho_[i] - rho_[i + 1]);
  const double b = h_ * rho_[i + 1];
  const double cell = right_[i] - right_[i + 1];
  const double r = tau - right_[i + 1];
  if (r >= cell) return x_[i];
  return x_[i + 1] - h_ * solve_cell(a, b, r);
}

QuantileRep quantile_rep(const Measure& mu, std::size_t levels) {
  if (levels == 0) throw ParameterError("need at least one quantile level");
  const QuantileFunction q(mu);
  QuantileRep rep;
  rep.levels.resize(levels);
  rep.values.resize(levels);
  const auto L = static_cast<double>(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    rep.levels[j] = (static_cast<double>(j) + 0.5) / L;
    rep.values[j] = q(rep.levels[j]);
  }
  return rep;
}

double wasserstein_1d(const Measure& mu, const Measure& nu, double p, std::size_t levels) {
  if (!(p >= 1.0)) throw ParameterError("Wasserstein order must be >= 1");
  const QuantileRep a = quantile_rep(mu, levels);
  const QuantileRep b = quantile_rep(nu, levels);
  double s = 0.0;
  for (std::size_t j = 0; j < levels; ++j) s += std::pow(std::abs(a.values[j] - b.values[j]), p);
  return std::pow(s / static_cast<double>(levels), 1.0 / p);
}

double max_correlation(const Measure& rho, const Measure& mu, std::size_t levels) {
  const QuantileRep a = quantile_rep(rho, levels);
  const QuantileRep b = quantile_rep(mu, levels);
  double s = 0.0;
  for (std::size_t j = 0; j < levels; ++j) s += a.values[j] * b.values[j];
  return s / static_cast<double>(levels);
}

AtomicMeasure geodesic(const Measure& mu0, const Measure& mu1, double t, std::size_t levels) {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("geodesic time must lie in [0, 1]");
  const QuantileRep a = quantile_rep(mu0, levels);
  const QuantileRep b = quantile_rep(mu1, levels);
  std::vector<Atom> atoms(levels);
  const double w = 1.0 / static_cast<double>(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    atoms[j] = {{(1.0 - t) * a.values[j] + t * b.values[j], 0.0}, w};
  }
  return AtomicMeasure::normalized(std::move(atoms));
}

double m2_geodesic_gap(const Measure& mu0, const Measure& mu1, double t, std::size_t levels) {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("geodesic time must lie in [0, 1]");
  const QuantileRep a = quantile_rep(mu0, levels);
  const QuantileRep b = quantile_rep(mu1, levels);
  double m0 = 0.0, m1 = 0.0, w2 = 0.0, mt = 0.0;
  for (std::size_t j = 0; j < levels; ++j) {
    const double x = a.values[j], y = b.values[j];
    const double z = (1.0 - t) * x + t * y;
    m0 += x * x;
    m1 += y * y;
    w2 += (x - y) * (x - y);
    mt += z * z;
  }
  const auto L = static_cast<double>(levels);
  return ((1.0 - t) * m0 + t * m1 - 0.5 * t * (1.0 - t) * w2 - mt) / L;
}

CouplingBound l1_moment_coupling_bound(const Density& mu, const Density& nu, double p, double q) {
  if (!(p > 1.0)) throw ParameterError("need p > 1");
  if (!(q >= 1.0 && q < p)) throw ParameterError("need 1 <= q < p");
  CouplingBound out;
  out.epsilon = l1_distance(mu, nu);
  if (out.epsilon == 0.0) return out;
  const double alpha = 0.5 * out.epsilon;
  const double mp = moments(Measure(mu), p) + moments(Measure(nu), p);
  auto bracket = [&](double log_r) {
    const double r = std::exp(log_r);
    return std::pow(2.0 * r, q) * alpha + std::pow(2.0, q - 1.0) * std::pow(r, q - p) * mp;
  };
  // The bracket is convex in log R; its stationary point anchors the search.
  const double r_star = std::pow((p - q) * mp / (2.0 * q * alpha), 1.0 / p);
  const double c = std::log(r_star);
  const Minimum m = golden_section(bracket, c - 20.0, c + 20.0, 1e-12);
  out.radius = std::exp(m.x);
  out.bound = std::pow(m.value, 1.0 / q);
  return out;
}

}  // namespace momlab
