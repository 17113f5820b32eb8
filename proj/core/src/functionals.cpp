#include "momlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "momlab/errors.hpp"
#include "momlab/optimize.hpp"
#include "momlab/transport.hpp"

namespace momlab {
namespace {

// log ∫ e^{−E} over g, computed with a shift for stability.
double log_integral_exp_neg(const Grid& g, const std::vector<double>& e) {
  double shift = kInf;
  for (double v : e) {
    if (std::isfinite(v)) shift = std::min(shift, v);
  }
  if (!std::isfinite(shift)) throw NormalizationError("integrand vanishes everywhere");
  std::vector<double> w(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    w[k] = std::isfinite(e[k]) ? std::exp(-(e[k] - shift)) : 0.0;
  }
  const double m = integrate(g, w);
  if (!(m > 0.0)) throw NormalizationError("integral of e^{-E} is zero");
  return std::log(m) - shift;
}

std::vector<double> regularized(const Field& f, double alpha) {
  const Grid& g = f.grid();
  std::vector<double> e(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    e[k] = f[k] + 0.5 * alpha * (x[0] * x[0] + x[1] * x[1]);
  }
  return e;
}

Field on_grid(const Field& f, const Grid& g) {
  return f.grid() == g ? f : resample(f, g);
}

// Smallest box containing the support of μ, widened by one spacing.
std::pair<Point, Point> support_box(const Measure& mu) {
  Point lo{kInf, kInf}, hi{-kInf, -kInf};
  auto take = [&](const Point& x) {
    for (std::size_t a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], x[a]);
      hi[a] = std::max(hi[a], x[a]);
    }
  };
  if (const auto* d = std::get_if<Density>(&mu)) {
    const Grid& g = d->grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if ((*d)[k] > 0.0) take(g.node(k));
    }
    for (int a = 0; a < g.dim(); ++a) {
      lo[static_cast<std::size_t>(a)] -= g.axis(a).spacing();
      hi[static_cast<std::size_t>(a)] += g.axis(a).spacing();
    }
  } else {
    for (const auto& at : std::get<AtomicMeasure>(mu).atoms()) take(at.x);
    for (std::size_t a = 0; a < 2; ++a) {
      const double pad = 0.05 * std::max(1.0, hi[a] - lo[a]);
      lo[a] -= pad;
      hi[a] += pad;
    }
  }
  return {lo, hi};
}

// Dual nodes whose maximizer lies on the edge of φ's effective domain see the
// conjugate of the truncated grid function (an affine piece with no
// curvature). They are set to +∞.
Conjugate interior_part(const Potential& phi, const Conjugate& c) {
  const Grid& g = phi.grid();
  std::vector<bool> edge(g.size(), false);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!std::isfinite(phi[k])) continue;
    for (int a = 0; a < g.dim() && !edge[k]; ++a) {
      const std::size_t i = a == 0 ? g.ix(k) : g.iy(k);
      const std::size_t n = g.axis(a).n;
      const std::size_t stride = (g.dim() == 1 || a == 1) ? 1 : g.axis(1).n;
      edge[k] = i == 0 || i + 1 == n || !std::isfinite(phi[k - stride]) ||
                !std::isfinite(phi[k + stride]);
    }
  }
  std::vector<double> v(c.potential.field().data());
  bool any = false;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (edge[c.argmax[j]]) {
      v[j] = kInf;
    } else {
      any = any || std::isfinite(v[j]);
    }
  }
  if (!any) throw DomainError("no dual node has a maximizer inside the effective domain");
  return {make_trusted_potential(Field(c.potential.grid(), std::move(v)), phi.convexity_tol()),
          c.argmax};
}

// Default dual grid of ψ, widened to contain the support of μ.
Grid dual_covering(const Potential& psi, const Measure& mu) {
  const Grid d = default_dual_grid(psi);
  const auto [lo, hi] = support_box(mu);
  auto widen = [&](const Axis& ax, std::size_t a) {
    const double nlo = std::min(ax.lo, lo[a]);
    const double nhi = std::max(ax.hi, hi[a]);
    if (nlo == ax.lo && nhi == ax.hi) return ax;
    const double h = ax.spacing();
    const auto n = static_cast<std::size_t>(std::ceil((nhi - nlo) / h)) + 1;
    return Axis{nlo, nhi, std::max<std::size_t>(n, 3)};
  };
  if (d.dim() == 1) {
    const Axis a = widen(d.axis(0), 0);
    return Grid::line(a.lo, a.hi, a.n);
  }
  return Grid::plane(widen(d.axis(0), 0), widen(d.axis(1), 1));
}

// inf over b of Σ m_k |r_k − b|, attained at a weighted median.
double l1_affine_residual(const std::vector<double>& r, const std::vector<double>& m) {
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  const double total = std::accumulate(m.begin(), m.end(), 0.0);
  double acc = 0.0, med = r.empty() ? 0.0 : r[order.back()];
  for (std::size_t k : order) {
    acc += m[k];
    if (acc >= 0.5 * total) {
      med = r[k];
      break;
    }
  }
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) s += m[k] * std::abs(r[k] - med);
  return s;
}

// Golden-section over a on a bracket found by doubling; g must be convex.
Minimum minimize_convex(const std::function<double(double)>& g, double center) {
  double r = 1.0;
  for (int it = 0; it < 60; ++it) {
    const bool right_ok = g(center + r) >= g(center + 0.5 * r);
    const bool left_ok = g(center - r) >= g(center - 0.5 * r);
    if (right_ok && left_ok) break;
    r *= 2.0;
  }
  return golden_section(g, center - r, center + r, 1e-12 * std::max(1.0, r));
}

}  // namespace

double grid_tolerance(const Grid& g) { return 10.0 * g.min_spacing() + 1e-8; }

double j_functional(const Potential& phi, const Measure& mu, double alpha,
                    const std::optional<Grid>& dual) {
  if (!(alpha >= 0.0)) throw ParameterError("α must be >= 0");
  const Conjugate c = dual ? legendre_transform(phi, *dual) : legendre_transform(phi);
  const double log_mass = log_integral_exp_neg(c.potential.grid(), regularized(c.potential.field(), alpha));
  return log_mass - integrate_against(phi.field(), mu);
}

double j_functional_dual(const Potential& psi, const Measure& mu, double alpha,
                         const std::optional<Grid>& dual) {
  if (!(alpha >= 0.0)) throw ParameterError("α must be >= 0");
  const double log_mass = log_integral_exp_neg(psi.grid(), regularized(psi.field(), alpha));
  if (const auto* atoms = std::get_if<AtomicMeasure>(&mu)) {
    // ψ* is kinked at atoms of the moment measure; evaluate it there directly.
    double s = 0.0;
    for (const Atom& a : atoms->atoms()) s += a.w * conjugate_at(psi, a.x);
    return log_mass - s;
  }
  const Conjugate c = legendre_transform(psi, dual ? *dual : dual_covering(psi, mu));
  return log_mass - integrate_against(c.potential.field(), mu);
}

double e_functional(const Density& rho, const Measure& mu, double alpha) {
  if (!(alpha >= 0.0)) throw ParameterError("α must be >= 0");
  double e = entropy(rho) + max_correlation(rho, mu);
  if (alpha > 0.0) e += 0.5 * alpha * moments(rho, 2.0);
  return e;
}

double duality_gap(const Potential& phi, const Density& rho, const Measure& mu, double alpha,
                   const std::optional<Grid>& dual) {
  return j_functional(phi, mu, alpha, dual) + e_functional(rho, mu, alpha);
}

DeficitReport bl_deficit(const Field& f_in, const Potential& phi, double alpha, double grad_tol) {
  const Grid& g = phi.grid();
  const Field f = on_grid(f_in, g);
  const Density rho = gibbs(phi, alpha);
  const Gradient df = gradient(f);
  const Hessian hs = second_derivative(phi);
  DeficitReport rep;
  rep.clamp_warnings = hs.clamp_warnings;
  rep.tolerance = grid_tolerance(g);

  std::vector<double> dir(g.size(), 0.0);
  bool infinite = false;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (rho[k] == 0.0) continue;
    double q = 0.0;
    if (g.dim() == 1) {
      const double d = df.components[0][k];
      const double h = hs.entries[0][k];
      if (h > 0.0) {
        q = d * d / h;
      } else if (std::abs(d) >= grad_tol) {
        infinite = true;
      }
    } else {
      const double gx = df.components[0][k], gy = df.components[1][k];
      const double a = hs.entries[0][k], b = hs.entries[1][k], c = hs.entries[2][k];
      const double det = a * c - b * b;
      if (det > 1e-14 * (a + c) * (a + c) && det > 0.0) {
        q = (c * gx * gx - 2.0 * b * gx * gy + a * gy * gy) / det;
      } else if (std::hypot(gx, gy) >= grad_tol) {
        infinite = true;
      }
    }
    dir[k] = q * rho[k];
  }
  std::vector<double> fm(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) fm[k] = f[k] * rho[k];
  const double mean = integrate(g, fm);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c = f[k] - mean;
    fm[k] = c * c * rho[k];
  }
  rep.variance_term = integrate(g, fm);
  if (infinite) {
    rep.dirichlet_term = kInf;
    rep.deficit = kInf;
  } else {
    rep.dirichlet_term = integrate(g, dir);
    rep.deficit = rep.dirichlet_term - rep.variance_term;
  }
  return rep;
}

ManifoldDistance dist_to_bl_optimizers(const Field& f_in, const Potential& phi) {
  const Grid& g = phi.grid();
  if (g.dim() != 1) throw UnsupportedDimensionError("dist_to_bl_optimizers is 1D only");
  const Field f = on_grid(f_in, g);
  const Density rho = gibbs(phi, 0.0);
  const Field dphi = gradient(phi).components[0];
  std::vector<double> tmp(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) tmp[k] = f[k] * rho[k];
  const double b = integrate(g, tmp);
  auto objective = [&](double a) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      tmp[k] = rho[k] == 0.0 ? 0.0 : std::abs(f[k] - a * dphi[k] - b) * rho[k];
    }
    return integrate(g, tmp);
  };
  const Minimum m = minimize_convex(objective, 0.0);
  const double at0 = objective(0.0);
  if (at0 <= m.value) return {at0, 0.0, b};
  return {m.value, m.x, b};
}

namespace {

PrekopaCheck prekopa_scan(const Field& f, const Field& g, const Field& h, double s, double tol,
                          const std::array<std::size_t, 2>& stride) {
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0, 1)");
  const int dim = f.grid().dim();
  if (g.grid().dim() != dim || h.grid().dim() != dim) {
    throw DomainError("Prékopa check needs fields of one dimension");
  }
  auto nodes = [&](const Field& fld) {
    const Grid& gr = fld.grid();
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < gr.size(); ++k) {
      if (gr.ix(k) % stride[0] != 0 || gr.iy(k) % stride[1] != 0) continue;
      if (fld[k] > 0.0) out.push_back(k);
    }
    return out;
  };
  const auto fx = nodes(f);
  const auto gy = nodes(g);
  PrekopaCheck res;
  res.worst_violation = -kInf;
  std::vector<double> lf(fx.size()), lg(gy.size());
  for (std::size_t i = 0; i < fx.size(); ++i) lf[i] = s * std::log(f[fx[i]]);
  for (std::size_t j = 0; j < gy.size(); ++j) lg[j] = (1.0 - s) * std::log(g[gy[j]]);
  const Grid& hg = h.grid();
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const Point x = f.grid().node(fx[i]);
    for (std::size_t j = 0; j < gy.size(); ++j) {
      const Point y = g.grid().node(gy[j]);
      const Point z{s * x[0] + (1.0 - s) * y[0], s * x[1] + (1.0 - s) * y[1]};
      const double hz = hg.contains(z) ? interp(h, z) : 0.0;
      const double viol = std::exp(lf[i] + lg[j]) - hz;
      if (viol > res.worst_violation) {
        res.worst_violation = viol;
        res.x = x;
        res.y = y;
      }
    }
  }
  if (!std::isfinite(res.worst_violation)) res.worst_violation = 0.0;
  res.holds = res.worst_violation <= tol;
  return res;
}

std::size_t stride_for(std::size_t n, std::size_t max_nodes) {
  if (max_nodes < 2 || n <= max_nodes) return 1;
  return (n - 1 + max_nodes - 2) / (max_nodes - 1);
}

}  // namespace

PrekopaCheck prekopa_condition_check(const Field& f, const Field& g, const Field& h, double s,
                                     double tol, std::size_t max_nodes_per_axis) {
  std::array<std::size_t, 2> stride{1, 1};
  for (int a = 0; a < f.grid().dim(); ++a) {
    const std::size_t n = std::max(f.grid().axis(a).n, g.grid().axis(a).n);
    stride[static_cast<std::size_t>(a)] = stride_for(n, max_nodes_per_axis);
  }
  return prekopa_scan(f, g, h, s, tol, stride);
}

double pl_deficit(const Field& f, const Field& g, const Field& h, double s, bool check,
                  std::size_t max_nodes_per_axis) {
  if (check) {
    const PrekopaCheck c = prekopa_condition_check(f, g, h, s, 1e-12, max_nodes_per_axis);
    if (!c.holds) {
      throw PreconditionError("Prékopa condition fails (violation " +
                              std::to_string(c.worst_violation) + ")");
    }
  }
  const double a = integrate(f), b = integrate(g), c = integrate(h);
  if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("∫f and ∫g must be positive");
  return c / (std::pow(a, s) * std::pow(b, 1.0 - s)) - 1.0;
}

BlTriple bl_triple(const Field& f_in, const Potential& phi_in, double delta,
                   const SupConvolutionOptions& opts, std::size_t check_nodes_per_axis) {
  const Grid& g = phi_in.grid();
  const Field f = on_grid(f_in, g);
  const double log_z = gibbs(phi_in, 0.0).log_normalizer();
  const Potential phi = phi_in.plus(log_z);
  Field fd = sup_convolution_fdelta(f, phi, delta, opts);
  std::vector<double> u(g.size()), v(g.size()), w(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double p = phi[k];
    if (!std::isfinite(p)) {
      u[k] = v[k] = w[k] = 0.0;
      continue;
    }
    u[k] = std::exp(2.0 * delta * f[k] - p);
    v[k] = std::exp(-p);
    w[k] = std::exp(fd[k] - p);
  }
  BlTriple t{Field(g, std::move(u)), Field(g, std::move(v)), Field(g, std::move(w)),
             std::move(fd), phi, {}};
  // With even strides every checked midpoint is a node, where the sup in f_δ
  // dominates the pair exactly.
  std::array<std::size_t, 2> stride{1, 1};
  for (int a = 0; a < g.dim(); ++a) {
    std::size_t st = stride_for(g.axis(a).n, check_nodes_per_axis);
    if (st % 2 == 1) ++st;
    stride[static_cast<std::size_t>(a)] = st;
  }
  double scale = 0.0;
  for (double x : t.w.values()) scale = std::max(scale, x);
  for (double x : t.u.values()) scale = std::max(scale, x);
  t.check = prekopa_scan(t.u, t.v, t.w, 0.5, 1e-10 * std::max(1.0, scale), stride);
  if (!t.check.holds) {
    throw InvariantError("Prékopa condition fails for the constructed triple (violation " +
                         std::to_string(t.check.worst_violation) + ")");
  }
  return t;
}

double variation_first(const Potential& phi, const Field& v_in, const Measure& mu, double alpha,
                       const std::optional<Grid>& dual) {
  const Grid& g = phi.grid();
  const Field v = on_grid(v_in, g);
  const Conjugate c = dual ? legendre_transform(phi, *dual) : legendre_transform(phi);
  const Density rho = gibbs(c.potential, alpha);
  const Grid& dg = c.potential.grid();
  std::vector<double> tmp(dg.size());
  for (std::size_t j = 0; j < dg.size(); ++j) tmp[j] = rho[j] * v[c.argmax[j]];
  return integrate(dg, tmp) - integrate_against(v, mu);
}

double variation_second(const Potential& phi, const Field& v_in, double alpha,
                        const std::optional<Grid>& dual) {
  const Grid& g = phi.grid();
  const Field v = on_grid(v_in, g);
  const Conjugate full = dual ? legendre_transform(phi, *dual) : legendre_transform(phi);
  const Conjugate c = interior_part(phi, full);
  const Grid& dg = c.potential.grid();
  const Gradient grad = gradient(c.potential);
  std::vector<double> w(dg.size());
  for (std::size_t j = 0; j < dg.size(); ++j) {
    Point x{0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
      const Axis& ax = g.axis(a);
      x[static_cast<std::size_t>(a)] =
          std::clamp(grad.components[static_cast<std::size_t>(a)][j], ax.lo, ax.hi);
    }
    w[j] = interp(v, x);
  }
  const DeficitReport d = bl_deficit(Field(dg, std::move(w)), c.potential, alpha);
  return -d.deficit;
}

VariationReport variation_report(const Potential& phi, const Field& v_in, const Measure& mu,
                                 double alpha, const Grid& dual, double step_first,
                                 double step_second) {
  const Field v = on_grid(v_in, phi.grid());
  VariationReport r;
  r.step_first = step_first;
  r.step_second = step_second;
  r.first = variation_first(phi, v, mu, alpha, dual);
  r.second = variation_second(phi, v, alpha, dual);
  auto j_at = [&](double t) {
    const Potential p = make_trusted_potential(linear_combination(1.0, phi.field(), t, v));
    return j_functional(p, mu, alpha, dual);
  };
  r.fd_first = (j_at(step_first) - j_at(-step_first)) / (2.0 * step_first);
  const double j0 = j_at(0.0);
  r.fd_second = (j_at(step_second) - 2.0 * j0 + j_at(-step_second)) / (step_second * step_second);
  return r;
}

BackboneReport backbone_gap(const Potential& phi_bar, const Potential& phi, const Measure& mu,
                            std::size_t t_nodes, const std::optional<Grid>& dual_in) {
  const Grid& g = phi_bar.grid();
  if (!(phi.grid() == g)) throw DomainError("potentials live on different grids");
  std::vector<double> vv(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = phi[k], b = phi_bar[k];
    if (std::isfinite(a) != std::isfinite(b)) {
      throw DomainError("potentials must share their effective domain");
    }
    vv[k] = std::isfinite(a) ? a - b : 0.0;
  }
  const Field v(g, std::move(vv));
  const Grid dual = dual_in ? *dual_in : common_grid(default_dual_grid(phi_bar), default_dual_grid(phi));

  BackboneReport rep;
  rep.tolerance = grid_tolerance(g);
  rep.lhs = j_functional(phi, mu, 0.0, dual) - j_functional(phi_bar, mu, 0.0, dual);
  rep.first_variation = variation_first(phi_bar, v, mu, 0.0, dual);

  const Quadrature q = gauss_legendre_unit(t_nodes);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double t = q.nodes[i];
    const Potential pt = make_trusted_potential(linear_combination(1.0, phi_bar.field(), t, v),
                                                phi_bar.convexity_tol());
    rep.rhs += q.weights[i] * (1.0 - t) * variation_second(pt, v, 0.0, dual);
  }
  if (g.dim() == 1) {
    const AffineDistance a = dist_mod_affine(phi, phi_bar, t_nodes, dual);
    rep.best_lambda = a.lambda;
    rep.best_lambda_distance = a.distance;
  }
  return rep;
}

AffineDistance dist_mod_affine(const Potential& phi, const Potential& phi_bar, std::size_t t_nodes,
                               const std::optional<Grid>& dual_in) {
  const Grid& g = phi_bar.grid();
  if (g.dim() != 1) throw UnsupportedDimensionError("dist_mod_affine is 1D only");
  if (!(phi.grid() == g)) throw DomainError("potentials live on different grids");
  if (t_nodes == 0) throw ParameterError("need at least one t-node");
  std::vector<double> vv(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = phi[k], b = phi_bar[k];
    if (std::isfinite(a) != std::isfinite(b)) {
      throw DomainError("potentials must share their effective domain");
    }
    vv[k] = std::isfinite(a) ? a - b : 0.0;
  }
  const Field v(g, std::move(vv));
  const Grid dual = dual_in ? *dual_in : common_grid(default_dual_grid(phi_bar), default_dual_grid(phi));
  const Quadrature q = gauss_legendre_unit(t_nodes);
  AffineDistance best{kInf, 0.0};
  for (double t : q.nodes) {
    if (t >= 0.5) continue;
    const Potential pt = make_trusted_potential(linear_combination(1.0, phi_bar.field(), t, v),
                                                phi_bar.convexity_tol());
    // The moment measure of φ_t* is ρ pushed through the argmax map.
    const Conjugate c = legendre_transform(pt, dual);
    const Density rho = gibbs(c.potential, 0.0);
    const Grid& dg = c.potential.grid();
    std::vector<double> m(dg.size()), xs(dg.size()), r(dg.size());
    for (std::size_t j = 0; j < dg.size(); ++j) {
      m[j] = rho[j] * dg.weight(j);
      xs[j] = g.node(c.argmax[j])[0];
    }
    auto objective = [&](double a) {
      for (std::size_t j = 0; j < dg.size(); ++j) r[j] = v[c.argmax[j]] - a * xs[j];
      return l1_affine_residual(r, m);
    };
    const double d = minimize_convex(objective, 0.0).value;
    if (d < best.distance) best = {d, t};
  }
  if (!std::isfinite(best.distance)) throw ParameterError("no t-node below 1/2");
  return best;
}

}  // namespace momlab
