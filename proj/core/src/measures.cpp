#include "momlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "momlab/errors.hpp"
#include "momlab/optimize.hpp"

namespace momlab {
namespace {

double norm_of(const Point& p, int dim) {
  return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

}  // namespace

Density::Density(Field f, double mass_tol) : field_(std::move(f)) {
  for (std::size_t k = 0; k < field_.size(); ++k) {
    const double v = field_[k];
    if (!std::isfinite(v) || v < 0.0) {
      throw InvariantError("density value at node " + std::to_string(k) +
                           " is negative or infinite");
    }
  }
  const double mass = integrate(field_);
  if (std::abs(mass - 1.0) > mass_tol) {
    throw InvariantError("density mass " + std::to_string(mass) + " is not 1");
  }
}

Density Density::normalized(const Field& f) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!std::isfinite(f[k]) || f[k] < 0.0) {
      throw InvariantError("density value at node " + std::to_string(k) +
                           " is negative or infinite");
    }
  }
  const double mass = integrate(f);
  if (!(mass > 0.0)) throw NormalizationError("density has zero mass");
  return Density(f.map([mass](double v) { return v / mass; }));
}

Density Density::with_log_normalizer(double log_z) const {
  Density d = *this;
  d.log_z_ = log_z;
  return d;
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms, int dim)
    : atoms_(std::move(atoms)), dim_(dim) {
  if (dim_ != 1 && dim_ != 2) throw InvariantError("atomic measure dimension must be 1 or 2");
  if (atoms_.empty()) throw InvariantError("atomic measure has no atoms");
  double sum = 0.0;
  for (auto& a : atoms_) {
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw InvariantError("atom weights must be positive");
    if (!std::isfinite(a.x[0]) || !std::isfinite(a.x[1])) {
      throw InvariantError("atom locations must be finite");
    }
    if (dim_ == 1) a.x[1] = 0.0;
    sum += a.w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvariantError("atom weights sum to " + std::to_string(sum) + ", not 1");
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.x < b.x; });
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (atoms_[i].x == atoms_[i - 1].x) throw InvariantError("atom locations must be distinct");
  }
}

AtomicMeasure AtomicMeasure::normalized(std::vector<Atom> atoms, int dim) {
  if (dim == 1) {
    for (auto& a : atoms) a.x[1] = 0.0;
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> merged;
  double sum = 0.0;
  for (const auto& a : atoms) {
    if (!(a.w > 0.0)) continue;
    sum += a.w;
    if (!merged.empty() && merged.back().x == a.x) {
      merged.back().w += a.w;
    } else {
      merged.push_back(a);
    }
  }
  if (!(sum > 0.0)) throw NormalizationError("atomic measure has zero mass");
  for (auto& a : merged) a.w /= sum;
  return AtomicMeasure(std::move(merged), dim);
}

int dim_of(const Measure& m) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Density>) {
          return v.dim();
        } else {
          return v.dim();
        }
      },
      m);
}

Density gibbs(const Potential& phi, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("α must be >= 0");
  const Grid& g = phi.grid();
  std::vector<double> e(g.size());
  double shift = kInf;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    e[k] = phi[k] + 0.5 * alpha * r2;
    if (std::isfinite(e[k])) shift = std::min(shift, e[k]);
  }
  if (!std::isfinite(shift)) throw NormalizationError("Gibbs weight vanishes everywhere");
  for (auto& v : e) v = std::isfinite(v) ? std::exp(-(v - shift)) : 0.0;
  double mass = 0.0;
  try {
    mass = integrate(g, e);
  } catch (const RangeError&) {
    throw NormalizationError("Gibbs mass is not finite");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) throw NormalizationError("Gibbs mass is zero or infinite");
  for (auto& v : e) v /= mass;
  return Density(Field(g, std::move(e))).with_log_normalizer(std::log(mass) - shift);
}

Measure moment_measure(const Potential& psi, double alpha, const std::optional<Grid>& dual,
                       double plateau_tol) {
  const Grid& g = psi.grid();
  if (g.dim() != 1) throw UnsupportedDimensionError("moment_measure is 1D only");
  const Density rho = gibbs(psi, alpha);
  const Axis& ax = g.axis(0);
  const double h = ax.spacing();
  std::vector<double> slope, mass;
  for (std::size_t i = 0; i + 1 < ax.n; ++i) {
    if (!std::isfinite(psi[i]) || !std::isfinite(psi[i + 1])) continue;
    slope.push_back((psi[i + 1] - psi[i]) / h);
    mass.push_back(0.5 * h * (rho[i] + rho[i + 1]));
  }
  if (slope.empty()) throw DomainError("effective domain has no cells");

  // Plateau runs: consecutive cells whose slope stays within plateau_tol of
  // the run's first slope.
  bool all_plateaus = true;
  std::vector<Atom> atoms;
  for (std::size_t s = 0; s < slope.size();) {
    std::size_t e = s + 1;
    while (e < slope.size() && std::abs(slope[e] - slope[s]) < plateau_tol) ++e;
    if (e - s < 3) {
      all_plateaus = false;
      break;
    }
    double m = 0.0, ms = 0.0;
    for (std::size_t i = s; i < e; ++i) {
      m += mass[i];
      ms += mass[i] * slope[i];
    }
    if (m > 0.0) atoms.push_back({{ms / m, 0.0}, m});
    s = e;
  }
  if (all_plateaus && !atoms.empty()) return AtomicMeasure::normalized(std::move(atoms));

  const Grid dg = dual ? *dual : default_dual_grid(psi);
  if (dg.dim() != 1) throw DomainError("dual grid must be 1D");
  const Axis& dx = dg.axis(0);
  const double hd = dx.spacing();
  std::vector<double> dep(dx.n, 0.0);
  for (std::size_t c = 0; c < slope.size(); ++c) {
    const double u = (slope[c] - dx.lo) / hd;
    const double j = std::clamp(std::floor(u), 0.0, static_cast<double>(dx.n - 2));
    const double t = std::clamp(u - j, 0.0, 1.0);
    const auto jj = static_cast<std::size_t>(j);
    dep[jj] += (1.0 - t) * mass[c];
    dep[jj + 1] += t * mass[c];
  }
  for (std::size_t j = 0; j < dx.n; ++j) dep[j] /= dg.weight(j);
  return Density(Field(dg, std::move(dep)));
}

double moments(const Measure& mu, double p) {
  if (!(p > 0.0)) throw ParameterError("moment order must be positive");
  if (const auto* d = std::get_if<Density>(&mu)) {
    const Grid& g = d->grid();
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double r = norm_of(g.node(k), g.dim());
      v[k] = (*d)[k] == 0.0 ? 0.0 : std::pow(r, p) * (*d)[k];
    }
    return integrate(g, v);
  }
  const auto& a = std::get<AtomicMeasure>(mu);
  double s = 0.0;
  for (const auto& at : a.atoms()) s += at.w * std::pow(norm_of(at.x, a.dim()), p);
  return s;
}

double entropy(const Density& rho) {
  std::vector<double> v(rho.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double r = rho[k];
    v[k] = r > 0.0 ? r * std::log(r) : 0.0;
  }
  return integrate(rho.grid(), v);
}

Point barycenter(const Measure& mu) {
  if (const auto* d = std::get_if<Density>(&mu)) {
    const Grid& g = d->grid();
    std::vector<double> vx(g.size()), vy(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.node(k);
      vx[k] = x[0] * (*d)[k];
      vy[k] = x[1] * (*d)[k];
    }
    return {integrate(g, vx), g.dim() == 2 ? integrate(g, vy) : 0.0};
  }
  Point b{0.0, 0.0};
  for (const auto& at : std::get<AtomicMeasure>(mu).atoms()) {
    b[0] += at.w * at.x[0];
    b[1] += at.w * at.x[1];
  }
  return b;
}

Density center(const Density& rho) {
  const Point b = barycenter(Measure(rho));
  const Grid g = rho.grid().shifted({-b[0], -b[1]});
  return Density(Field(g, rho.field().data()));
}

Measure center(const Measure& mu) {
  if (const auto* d = std::get_if<Density>(&mu)) return center(*d);
  const auto& a = std::get<AtomicMeasure>(mu);
  const Point b = barycenter(mu);
  std::vector<Atom> atoms = a.atoms();
  for (auto& at : atoms) {
    at.x[0] -= b[0];
    at.x[1] -= b[1];
  }
  return AtomicMeasure::normalized(std::move(atoms), a.dim());
}

double theta(const Measure& mu) {
  if (dim_of(mu) == 1) return moments(mu, 1.0);
  auto directional = [&mu](double th) {
    const double c = std::cos(th), s = std::sin(th);
    if (const auto* d = std::get_if<Density>(&mu)) {
      const Grid& g = d->grid();
      std::vector<double> v(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Point x = g.node(k);
        v[k] = std::abs(c * x[0] + s * x[1]) * (*d)[k];
      }
      return integrate(g, v);
    }
    double acc = 0.0;
    for (const auto& at : std::get<AtomicMeasure>(mu).atoms()) {
      acc += at.w * std::abs(c * at.x[0] + s * at.x[1]);
    }
    return acc;
  };
  constexpr std::size_t kDirections = 720;
  const double step = std::numbers::pi / static_cast<double>(kDirections);
  std::size_t best = 0;
  double fbest = directional(0.0);
  for (std::size_t k = 1; k < kDirections; ++k) {
    const double v = directional(step * static_cast<double>(k));
    if (v < fbest) {
      fbest = v;
      best = k;
    }
  }
  const double c = step * static_cast<double>(best);
  const Minimum m = golden_section(directional, c - step, c + step, 1e-12);
  return std::min(fbest, m.value);
}

double l1_distance(const Density& mu, const Density& nu) {
  const Grid g = common_grid(mu.grid(), nu.grid());
  const Field a = resample(mu.field(), g);
  const Field b = resample(nu.field(), g);
  std::vector<double> d(g.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::abs(a[k] - b[k]);
  return integrate(g, d);
}

TranslationFit l1_dist_mod_translation(const Density& rho, const Density& rho_bar,
                                       double max_shift_fraction) {
  if (rho.dim() != 1 || rho_bar.dim() != 1) {
    throw UnsupportedDimensionError("l1_dist_mod_translation is 1D only");
  }
  const Grid g = common_grid(rho.grid(), rho_bar.grid());
  const Field a = resample(rho.field(), g);
  const Axis& bx = rho_bar.grid().axis(0);
  const std::size_t n = g.size();
  std::vector<double> diff(n);
  auto objective = [&](double x0) {
    for (std::size_t k = 0; k < n; ++k) {
      const double y = g.node(k)[0] + x0;
      const double b = (y >= bx.lo && y <= bx.hi) ? interp(rho_bar.field(), y) : 0.0;
      diff[k] = std::abs(a[k] - b);
    }
    return integrate(g, diff);
  };
  const double limit = max_shift_fraction * g.axis(0).width();
  const double h = g.axis(0).spacing();
  const auto steps = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(2.0 * limit / h)));
  Minimum m = limit > 0.0 ? scan_then_golden(objective, -limit, limit, steps, 1e-12)
                          : Minimum{0.0, objective(0.0)};
  const double at0 = objective(0.0);
  if (at0 <= m.value) m = {0.0, at0};
  return {m.value, m.x, limit > 0.0 && std::abs(m.x) > limit - h};
}

double integrate_against(const Field& phi, const Measure& mu) {
  const Grid& g = phi.grid();
  if (const auto* d = std::get_if<Density>(&mu)) {
    const Grid& mg = d->grid();
    const bool same = mg == g;
    std::vector<double> v(mg.size(), 0.0);
    for (std::size_t k = 0; k < mg.size(); ++k) {
      if ((*d)[k] == 0.0) continue;
      double val;
      if (same) {
        val = phi[k];
      } else {
        const Point x = mg.node(k);
        if (!g.contains(x)) throw DomainError("measure charges points outside the potential's box");
        val = interp(phi, x);
      }
      if (!std::isfinite(val)) throw DomainError("measure charges the set where the potential is +inf");
      v[k] = val * (*d)[k];
    }
    return integrate(mg, v);
  }
  const auto& a = std::get<AtomicMeasure>(mu);
  double s = 0.0;
  for (const auto& at : a.atoms()) {
    for (int ax = 0; ax < g.dim(); ++ax) {
      const Axis& A = g.axis(ax);
      const double c = at.x[static_cast<std::size_t>(ax)];
      if (!(c > A.lo && c < A.hi)) throw DomainError("atom lies outside the interior of the potential's box");
    }
    const double val = interp(phi, at.x);
    if (!std::isfinite(val)) throw DomainError("atom sits where the potential is +inf");
    s += at.w * val;
  }
  return s;
}

}  // namespace momlab
