#include "momlab/convexlab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momlab/errors.hpp"

namespace momlab {
namespace {

// Calls visit(indices) for every grid line: the single line in 1D; rows,
// columns and both diagonal families in 2D.
template <class Visit>
void for_each_line(const Grid& g, Visit&& visit) {
  std::vector<std::size_t> idx;
  if (g.dim() == 1) {
    idx.resize(g.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    visit(idx);
    return;
  }
  const std::size_t nx = g.axis(0).n;
  const std::size_t ny = g.axis(1).n;
  for (std::size_t i = 0; i < nx; ++i) {
    idx.clear();
    for (std::size_t j = 0; j < ny; ++j) idx.push_back(g.index(i, j));
    visit(idx);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    idx.clear();
    for (std::size_t i = 0; i < nx; ++i) idx.push_back(g.index(i, j));
    visit(idx);
  }
  // Diagonals (i+t, j+t) and anti-diagonals (i+t, j−t).
  auto walk = [&](std::size_t i, std::size_t j, bool anti) {
    idx.clear();
    while (i < nx && j < ny) {
      idx.push_back(g.index(i, j));
      ++i;
      if (anti) {
        if (j == 0) break;
        --j;
      } else {
        ++j;
      }
    }
    if (idx.size() >= 3) visit(idx);
  };
  for (std::size_t j = 0; j < ny; ++j) walk(0, j, false);
  for (std::size_t i = 1; i < nx; ++i) walk(i, 0, false);
  for (std::size_t j = 0; j < ny; ++j) walk(0, j, true);
  for (std::size_t i = 1; i < nx; ++i) walk(i, ny - 1, true);
}

double scale_of(double a, double b, double c) {
  return std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
}

// Values of the 1D discrete conjugate of (x_i, v_i) at the nodes of `dual`.
// Infinite v_i are skipped; ties resolve to the leftmost hull vertex.
void hull_conjugate(const Axis& primal, std::span<const double> v,
                    const Axis& dual, std::vector<double>& out,
                    std::vector<std::size_t>& arg) {
  const std::size_t n = primal.n;
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) continue;
    const double xi = primal.node(i);
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double xa = primal.node(a), xb = primal.node(b);
      const double cross = (xb - xa) * (v[i] - v[a]) - (v[b] - v[a]) * (xi - xa);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  out.assign(dual.n, -kInf);
  arg.assign(dual.n, 0);
  if (hull.empty()) return;
  std::size_t p = 0;
  for (std::size_t j = 0; j < dual.n; ++j) {
    const double y = dual.node(j);
    while (p + 1 < hull.size()) {
      const std::size_t a = hull[p], b = hull[p + 1];
      const double slope = (v[b] - v[a]) / (primal.node(b) - primal.node(a));
      if (slope < y) {
        ++p;
      } else {
        break;
      }
    }
    out[j] = primal.node(hull[p]) * y - v[hull[p]];
    arg[j] = hull[p];
  }
}

// Cell-slope range of f along axis `a` over cells with both ends finite.
std::pair<double, double> slope_range(const Field& f, int a) {
  const Grid& g = f.grid();
  double lo = kInf, hi = -kInf;
  const double h = g.axis(a).spacing();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t i = a == 0 ? g.ix(k) : g.iy(k);
    if (i + 1 >= g.axis(a).n) continue;
    const std::size_t next = g.dim() == 1 ? k + 1
                             : a == 0     ? g.index(g.ix(k) + 1, g.iy(k))
                                          : g.index(g.ix(k), g.iy(k) + 1);
    if (!std::isfinite(f[k]) || !std::isfinite(f[next])) continue;
    const double s = (f[next] - f[k]) / h;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

Axis padded_axis(std::pair<double, double> r, std::size_t n, double pad) {
  auto [lo, hi] = r;
  if (!std::isfinite(lo)) return Axis{-1.0, 1.0, n};
  double w = hi - lo;
  if (w <= 1e-12 * std::max(1.0, std::abs(hi))) {
    const double c = 0.5 * (lo + hi);
    const double half = 0.5 * std::max(1.0, std::abs(c));
    return Axis{c - half, c + half, n};
  }
  return Axis{lo - pad * w, hi + pad * w, n};
}

// Andrew's monotone chain; returns hull vertices counter-clockwise.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool inside_hull(const std::vector<Point>& hull, const Point& p, double eps) {
  if (hull.size() < 3) {
    // Degenerate hull: a segment or a point.
    if (hull.empty()) return false;
    const Point& a = hull.front();
    const Point& b = hull.back();
    const double cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    if (std::abs(cr) > eps) return false;
    return p[0] >= std::min(a[0], b[0]) - eps && p[0] <= std::max(a[0], b[0]) + eps &&
           p[1] >= std::min(a[1], b[1]) - eps && p[1] <= std::max(a[1], b[1]) + eps;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    const double cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    if (cr < -eps) return false;
  }
  return true;
}

}  // namespace

std::optional<ConvexityViolation> find_convexity_violation(const Field& f,
                                                           double tol) {
  std::optional<ConvexityViolation> worst;
  auto note = [&](std::size_t node, double v) {
    if (!worst || v > worst->violation) worst = ConvexityViolation{node, v};
  };
  for_each_line(f.grid(), [&](const std::vector<std::size_t>& idx) {
    std::size_t first = idx.size(), last = 0;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      if (std::isfinite(f[idx[t]])) {
        first = std::min(first, t);
        last = t;
      }
    }
    if (first == idx.size()) return;
    for (std::size_t t = first; t <= last; ++t) {
      if (!std::isfinite(f[idx[t]])) {
        note(idx[t], kInf);
        return;
      }
    }
    for (std::size_t t = first + 1; t + 1 <= last; ++t) {
      const double a = f[idx[t - 1]], b = f[idx[t]], c = f[idx[t + 1]];
      const double d2 = a - 2.0 * b + c;
      const double v = -d2 - tol * scale_of(a, b, c);
      if (v > 0.0) note(idx[t], -d2);
    }
  });
  return worst;
}

Potential::Potential(Field f, double convexity_tol)
    : field_(std::move(f)), tol_(convexity_tol) {
  if (!(tol_ >= 0.0)) throw ParameterError("convexity tolerance must be >= 0");
  if (auto v = find_convexity_violation(field_, tol_)) {
    const std::string what =
        std::isinf(v->violation)
            ? "effective domain is not convex at node " + std::to_string(v->node)
            : "field is not convex at node " + std::to_string(v->node) +
                  " (second difference " + std::to_string(-v->violation) + ")";
    throw ConvexityError(what, v->node, v->violation);
  }
}

Potential Potential::plus(double c) const {
  return Potential(field_.map([c](double v) { return v + c; }), tol_, Trusted{});
}

Potential make_trusted_potential(Field f, double tol) {
  return Potential(std::move(f), tol, Potential::Trusted{});
}

Grid default_dual_grid(const Potential& phi, double pad) {
  const Grid& g = phi.grid();
  const Axis ax = padded_axis(slope_range(phi.field(), 0), g.axis(0).n, pad);
  if (g.dim() == 1) return Grid::line(ax.lo, ax.hi, ax.n);
  const Axis ay = padded_axis(slope_range(phi.field(), 1), g.axis(1).n, pad);
  return Grid::plane(ax, ay);
}

double conjugate_at(const Potential& phi, const Point& y) {
  const Grid& g = phi.grid();
  double best = -kInf;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!std::isfinite(phi[k])) continue;
    const Point x = g.node(k);
    const double ip = g.dim() == 1 ? x[0] * y[0] : x[0] * y[0] + x[1] * y[1];
    best = std::max(best, ip - phi[k]);
  }
  return best;
}

Conjugate legendre_transform(const Potential& phi, const Grid& dual) {
  const Grid& g = phi.grid();
  if (dual.dim() != g.dim()) throw DomainError("dual grid has wrong dimension");
  const auto v = phi.field().values();
  std::vector<double> out;
  std::vector<std::size_t> arg;
  if (g.dim() == 1) {
    hull_conjugate(g.axis(0), v, dual.axis(0), out, arg);
    return {make_trusted_potential(Field(dual, std::move(out)), phi.convexity_tol()),
            std::move(arg)};
  }
  const std::size_t nx = g.axis(0).n, ny = g.axis(1).n;
  const std::size_t mx = dual.axis(0).n, my = dual.axis(1).n;
  // Inner conjugate over x2 for every primal row: c(i, y2).
  std::vector<double> c(nx * my);
  std::vector<std::size_t> cj(nx * my);
  std::vector<double> row(ny), tmp;
  std::vector<std::size_t> targ;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) row[j] = v[g.index(i, j)];
    hull_conjugate(g.axis(1), row, dual.axis(1), tmp, targ);
    for (std::size_t jj = 0; jj < my; ++jj) {
      c[i * my + jj] = tmp[jj];
      cj[i * my + jj] = targ[jj];
    }
  }
  // Outer conjugate over x1 of −c(·, y2).
  out.assign(mx * my, 0.0);
  arg.assign(mx * my, 0);
  std::vector<double> col(nx);
  for (std::size_t jj = 0; jj < my; ++jj) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double ci = c[i * my + jj];
      col[i] = ci == -kInf ? kInf : -ci;
    }
    hull_conjugate(g.axis(0), col, dual.axis(0), tmp, targ);
    for (std::size_t ii = 0; ii < mx; ++ii) {
      const std::size_t k = dual.index(ii, jj);
      out[k] = tmp[ii];
      arg[k] = g.index(targ[ii], cj[targ[ii] * my + jj]);
    }
  }
  return {make_trusted_potential(Field(dual, std::move(out)), phi.convexity_tol()),
          std::move(arg)};
}

Conjugate legendre_transform(const Potential& phi) {
  return legendre_transform(phi, default_dual_grid(phi));
}

Potential convexify(const Field& f, double convexity_tol) {
  const Grid& g = f.grid();
  const auto v = f.values();
  std::vector<double> out(g.size(), kInf);
  if (g.dim() == 1) {
    const Axis& ax = g.axis(0);
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < ax.n; ++i) {
      if (!std::isfinite(v[i])) continue;
      const double xi = ax.node(i);
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2];
        const std::size_t b = hull.back();
        const double xa = ax.node(a), xb = ax.node(b);
        const double cross = (xb - xa) * (v[i] - v[a]) - (v[b] - v[a]) * (xi - xa);
        if (cross <= 0.0) {
          hull.pop_back();
        } else {
          break;
        }
      }
      hull.push_back(i);
    }
    out[hull.front()] = v[hull.front()];
    for (std::size_t p = 0; p + 1 < hull.size(); ++p) {
      const std::size_t a = hull[p], b = hull[p + 1];
      const double xa = ax.node(a), xb = ax.node(b);
      for (std::size_t i = a; i <= b; ++i) {
        const double t = (ax.node(i) - xa) / (xb - xa);
        double val = i == a ? v[a] : i == b ? v[b] : v[a] + t * (v[b] - v[a]);
        if (std::isfinite(v[i])) val = std::min(val, v[i]);
        out[i] = val;
      }
    }
    return make_trusted_potential(Field(g, std::move(out)), convexity_tol);
  }
  const Axis ax = padded_axis(slope_range(f, 0), g.axis(0).n, 0.05);
  const Axis ay = padded_axis(slope_range(f, 1), g.axis(1).n, 0.05);
  const Grid dual = Grid::plane(ax, ay);
  const Potential raw = make_trusted_potential(f, convexity_tol);
  const Conjugate star = legendre_transform(raw, dual);
  const Conjugate bi = legendre_transform(star.potential, g);
  std::vector<Point> finite_pts;
  bool all_finite = true;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isfinite(v[k])) {
      finite_pts.push_back(g.node(k));
    } else {
      all_finite = false;
    }
  }
  const std::vector<Point> hull = all_finite ? std::vector<Point>{} : convex_hull(finite_pts);
  const double eps = 1e-9 * g.min_spacing();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isfinite(v[k])) {
      out[k] = std::min(v[k], bi.potential[k]);
    } else if (!all_finite && inside_hull(hull, g.node(k), eps)) {
      out[k] = bi.potential[k];
    }
  }
  return make_trusted_potential(Field(g, std::move(out)), convexity_tol);
}

Gradient gradient(const Field& f) {
  const Grid& g = f.grid();
  Gradient out;
  out.one_sided.assign(g.size(), false);
  out.defined.assign(g.size(), true);
  for (int a = 0; a < g.dim(); ++a) {
    const Axis& ax = g.axis(a);
    const double h = ax.spacing();
    std::vector<double> d(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!std::isfinite(f[k])) {
        out.defined[k] = false;
        continue;
      }
      const std::size_t i = a == 0 ? g.ix(k) : g.iy(k);
      auto neighbour = [&](std::size_t ii) {
        return g.dim() == 1 ? ii : a == 0 ? g.index(ii, g.iy(k)) : g.index(g.ix(k), ii);
      };
      const bool has_prev = i > 0 && std::isfinite(f[neighbour(i - 1)]);
      const bool has_next = i + 1 < ax.n && std::isfinite(f[neighbour(i + 1)]);
      if (has_prev && has_next) {
        d[k] = (f[neighbour(i + 1)] - f[neighbour(i - 1)]) / (2.0 * h);
      } else if (has_next) {
        d[k] = (f[neighbour(i + 1)] - f[k]) / h;
        out.one_sided[k] = true;
      } else if (has_prev) {
        d[k] = (f[k] - f[neighbour(i - 1)]) / h;
        out.one_sided[k] = true;
      } else {
        out.one_sided[k] = true;
      }
    }
    out.components.emplace_back(g, std::move(d));
  }
  return out;
}

Hessian second_derivative(const Potential& phi) {
  const Grid& g = phi.grid();
  const Field& f = phi.field();
  const double tol = phi.convexity_tol();
  Hessian out;
  auto finite = [&](std::size_t k) { return std::isfinite(f[k]); };

  // Second difference along axis a at node k; false when the stencil leaves
  // the effective domain.
  auto d2 = [&](std::size_t k, int a, double& val, double& scale) {
    const std::size_t i = a == 0 ? g.ix(k) : g.iy(k);
    const Axis& ax = g.axis(a);
    if (i == 0 || i + 1 >= ax.n || !finite(k)) return false;
    auto nb = [&](std::size_t ii) {
      return g.dim() == 1 ? ii : a == 0 ? g.index(ii, g.iy(k)) : g.index(g.ix(k), ii);
    };
    const std::size_t p = nb(i - 1), q = nb(i + 1);
    if (!finite(p) || !finite(q)) return false;
    const double h = ax.spacing();
    val = (f[p] - 2.0 * f[k] + f[q]) / (h * h);
    scale = scale_of(f[p], f[k], f[q]) / (h * h);
    return true;
  };

  if (g.dim() == 1) {
    const std::size_t n = g.size();
    std::vector<double> v(n, 0.0);
    std::vector<bool> have(n, false);
    for (std::size_t k = 0; k < n; ++k) {
      double val = 0.0, scale = 1.0;
      if (!d2(k, 0, val, scale)) continue;
      if (val < 0.0) {
        if (val < -tol * scale) ++out.clamp_warnings;
        val = 0.0;
      }
      v[k] = val;
      have[k] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (have[k] || !finite(k)) continue;
      if (k + 1 < n && have[k + 1]) {
        v[k] = v[k + 1];
      } else if (k > 0 && have[k - 1]) {
        v[k] = v[k - 1];
      }
    }
    out.entries.emplace_back(g, std::move(v));
    return out;
  }

  const std::size_t n = g.size();
  std::vector<double> xx(n, 0.0), xy(n, 0.0), yy(n, 0.0);
  std::vector<bool> have(n, false);
  const double hx = g.axis(0).spacing(), hy = g.axis(1).spacing();
  for (std::size_t k = 0; k < n; ++k) {
    double a = 0.0, c = 0.0, sa = 1.0, sc = 1.0;
    if (!d2(k, 0, a, sa) || !d2(k, 1, c, sc)) continue;
    const std::size_t i = g.ix(k), j = g.iy(k);
    const std::size_t pp = g.index(i + 1, j + 1), pm = g.index(i + 1, j - 1);
    const std::size_t mp = g.index(i - 1, j + 1), mm = g.index(i - 1, j - 1);
    double b = 0.0;
    if (finite(pp) && finite(pm) && finite(mp) && finite(mm)) {
      b = (f[pp] - f[pm] - f[mp] + f[mm]) / (4.0 * hx * hy);
    }
    const double m = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    const double l1 = m - r, l2 = m + r;
    if (l1 < 0.0) {
      if (l1 < -tol * std::max(sa, sc)) ++out.clamp_warnings;
      const double p2 = std::max(l2, 0.0);
      if (r == 0.0) {
        a = c = p2;
        b = 0.0;
      } else {
        double ex = 0.5 * (a - c) + r, ey = b;
        if (std::hypot(ex, ey) < 1e-300) {
          ex = b;
          ey = r - 0.5 * (a - c);
        }
        const double nrm = std::hypot(ex, ey);
        ex /= nrm;
        ey /= nrm;
        a = p2 * ex * ex;
        b = p2 * ex * ey;
        c = p2 * ey * ey;
      }
    }
    xx[k] = a;
    xy[k] = b;
    yy[k] = c;
    have[k] = true;
  }
  // Edge nodes take the value of an adjacent interior node.
  for (std::size_t k = 0; k < n; ++k) {
    if (have[k] || !finite(k)) continue;
    const std::size_t i = g.ix(k), j = g.iy(k);
    const std::size_t nx = g.axis(0).n, ny = g.axis(1).n;
    const std::size_t ci = std::clamp<std::size_t>(i, 1, nx - 2);
    const std::size_t cj = std::clamp<std::size_t>(j, 1, ny - 2);
    const std::size_t src = g.index(ci, cj);
    if (have[src]) {
      xx[k] = xx[src];
      xy[k] = xy[src];
      yy[k] = yy[src];
    }
  }
  out.entries.emplace_back(g, std::move(xx));
  out.entries.emplace_back(g, std::move(xy));
  out.entries.emplace_back(g, std::move(yy));
  return out;
}

std::optional<ConvexityViolation> find_concavity_violation(const Field& f,
                                                           const Potential& phi,
                                                           double delta,
                                                           double tol) {
  if (!(f.grid() == phi.grid())) throw DomainError("f and φ live on different grids");
  std::optional<ConvexityViolation> worst;
  for_each_line(phi.grid(), [&](const std::vector<std::size_t>& idx) {
    for (std::size_t t = 1; t + 1 < idx.size(); ++t) {
      const std::size_t p = idx[t - 1], k = idx[t], q = idx[t + 1];
      if (!std::isfinite(phi[p]) || !std::isfinite(phi[k]) || !std::isfinite(phi[q])) {
        continue;
      }
      const double a = 2.0 * delta * f[p] - phi[p];
      const double b = 2.0 * delta * f[k] - phi[k];
      const double c = 2.0 * delta * f[q] - phi[q];
      const double d2 = a - 2.0 * b + c;
      if (d2 > tol * scale_of(phi[p], phi[k], phi[q]) &&
          (!worst || d2 > worst->violation)) {
        worst = ConvexityViolation{k, d2};
      }
    }
  });
  return worst;
}

Field sup_convolution_fdelta(const Field& f, const Potential& phi, double delta,
                             const SupConvolutionOptions& opts) {
  const Grid& g = phi.grid();
  if (!(f.grid() == g)) throw DomainError("f and φ live on different grids");
  if (!f.all_finite()) throw DomainError("f must be finite on the grid");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ParameterError("δ must be >= 0");
  const double tol = phi.convexity_tol();
  if (auto v = find_concavity_violation(f, phi, delta, tol)) {
    double lo = 0.0, hi = delta;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (find_concavity_violation(f, phi, mid, tol)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    throw ConcavityError("2δf − φ is not concave at node " + std::to_string(v->node) +
                             "; largest admissible δ ≈ " + std::to_string(lo),
                         v->node, v->violation, lo);
  }
  if (g.dim() == 2 && !opts.windowed && (g.axis(0).n > 201 || g.axis(1).n > 201)) {
    throw ParameterError("exhaustive 2D sup-convolution is limited to 201 nodes per axis");
  }

  double window = kInf;
  if (opts.windowed && delta > 0.0) {
    double lip = 0.0;
    const Gradient gf = gradient(f);
    for (const auto& c : gf.components) {
      for (double d : c.values()) lip = std::max(lip, std::abs(d));
    }
    const Hessian hs = second_derivative(phi);
    double modulus = kInf;
    if (g.dim() == 1) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::isfinite(phi[k])) modulus = std::min(modulus, hs.entries[0][k]);
      }
    } else {
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (!std::isfinite(phi[k])) continue;
        const double a = hs.entries[0][k], b = hs.entries[1][k], c = hs.entries[2][k];
        modulus = std::min(modulus, 0.5 * (a + c) - std::hypot(0.5 * (a - c), b));
      }
    }
    if (modulus > 0.0 && std::isfinite(modulus)) {
      window = opts.window_factor * delta * lip / modulus;
    }
  }

  std::vector<double> out(g.size());
  if (g.dim() == 1) {
    const std::size_t n = g.size();
    const double h = g.axis(0).spacing();
    const std::size_t kmax_w =
        std::isfinite(window) ? static_cast<std::size_t>(std::ceil(window / h)) + 1 : n;
    for (std::size_t z = 0; z < n; ++z) {
      double best = delta * f[z];
      if (std::isfinite(phi[z])) {
        const std::size_t kmax = std::min({z, n - 1 - z, kmax_w});
        for (std::size_t k = 1; k <= kmax; ++k) {
          const double pp = phi[z + k], pm = phi[z - k];
          if (!std::isfinite(pp) || !std::isfinite(pm)) break;
          const double bracket = 0.5 * pp + 0.5 * pm - phi[z];
          const double cand = delta * std::max(f[z + k], f[z - k]) - bracket;
          if (cand > best) best = cand;
        }
      }
      out[z] = best;
    }
    return Field(g, std::move(out));
  }

  const std::size_t nx = g.axis(0).n, ny = g.axis(1).n;
  const double hx = g.axis(0).spacing(), hy = g.axis(1).spacing();
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t z = g.index(i, j);
      double best = delta * f[z];
      if (std::isfinite(phi[z])) {
        const auto ki = static_cast<std::ptrdiff_t>(std::min(i, nx - 1 - i));
        const auto kj = static_cast<std::ptrdiff_t>(std::min(j, ny - 1 - j));
        for (std::ptrdiff_t a = -ki; a <= ki; ++a) {
          const double dx = static_cast<double>(a) * hx;
          if (std::abs(dx) > window) continue;
          for (std::ptrdiff_t b = -kj; b <= kj; ++b) {
            const double dy = static_cast<double>(b) * hy;
            if (std::hypot(dx, dy) > window) continue;
            const std::size_t p = g.index(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + a),
                                          static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + b));
            const std::size_t m = g.index(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) - a),
                                          static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) - b));
            if (!std::isfinite(phi[p]) || !std::isfinite(phi[m])) continue;
            const double cand = delta * f[p] - (0.5 * phi[p] + 0.5 * phi[m] - phi[z]);
            if (cand > best) best = cand;
          }
        }
      }
      out[z] = best;
    }
  }
  return Field(g, std::move(out));
}

double strong_convexity_modulus(const Potential& phi, double margin) {
  const Grid& g = phi.grid();
  if (g.dim() != 1) throw UnsupportedDimensionError("strong_convexity_modulus is 1D only");
  std::size_t first = g.size(), last = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isfinite(phi[k])) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == g.size()) throw DomainError("empty effective domain");
  const Axis& ax = g.axis(0);
  const double lo = ax.node(first), hi = ax.node(last);
  const double w = hi - lo;
  const Hessian hs = second_derivative(phi);
  double m = kInf;
  for (std::size_t k = first; k <= last; ++k) {
    const double x = ax.node(k);
    if (x < lo + margin * w || x > hi - margin * w) continue;
    m = std::min(m, hs.entries[0][k]);
  }
  if (!std::isfinite(m)) throw DomainError("strong-convexity window is empty");
  return m;
}

}  // namespace momlab
