#include "momlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momlab/errors.hpp"

namespace momlab {
namespace {

void validate_axis(const Axis& a, const char* name) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi)) {
    throw ParameterError(std::string("grid axis ") + name +
                         ": need finite lo < hi");
  }
  if (a.n < 3) {
    throw ParameterError(std::string("grid axis ") + name +
                         ": need at least 3 nodes");
  }
}

double axis_weight(const Axis& a, std::size_t i) {
  const double h = a.spacing();
  return (i == 0 || i + 1 == a.n) ? 0.5 * h : h;
}

// Cell index and local coordinate of x on axis a; x must lie in [lo, hi].
struct Locate {
  std::size_t i;
  double t;
};

Locate locate(const Axis& a, double x) {
  const double s = (x - a.lo) / a.spacing();
  const auto last = static_cast<double>(a.n - 1);
  const double r = std::clamp(std::round(s), 0.0, last);
  const auto ir = static_cast<std::size_t>(r);
  if (a.node(ir) == x) {
    if (ir + 1 == a.n) return {ir - 1, 1.0};
    return {ir, 0.0};
  }
  const double fl = std::clamp(std::floor(s), 0.0, last - 1.0);
  const auto i = static_cast<std::size_t>(fl);
  const double t = std::clamp((x - a.node(i)) / a.spacing(), 0.0, 1.0);
  return {i, t};
}

}  // namespace

Grid Grid::line(double lo, double hi, std::size_t n, std::size_t node_cap) {
  const Axis a{lo, hi, n};
  validate_axis(a, "x");
  if (n > node_cap) throw ParameterError("grid exceeds node cap");
  return Grid(1, {a, Axis{0.0, 1.0, 1}});
}

Grid Grid::plane(const Axis& x, const Axis& y, std::size_t node_cap) {
  validate_axis(x, "x");
  validate_axis(y, "y");
  if (x.n > node_cap / y.n) throw ParameterError("grid exceeds node cap");
  return Grid(2, {x, y});
}

std::size_t Grid::size() const {
  return dim_ == 1 ? axes_[0].n : axes_[0].n * axes_[1].n;
}

Point Grid::node(std::size_t k) const {
  if (dim_ == 1) return {axes_[0].node(k), 0.0};
  return {axes_[0].node(ix(k)), axes_[1].node(iy(k))};
}

double Grid::weight(std::size_t k) const {
  if (dim_ == 1) return axis_weight(axes_[0], k);
  return axis_weight(axes_[0], ix(k)) * axis_weight(axes_[1], iy(k));
}

bool Grid::contains(const Point& p) const {
  for (int a = 0; a < dim_; ++a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    if (!(p[static_cast<std::size_t>(a)] >= ax.lo &&
          p[static_cast<std::size_t>(a)] <= ax.hi)) {
      return false;
    }
  }
  return true;
}

Grid Grid::shifted(const Point& offset) const {
  Grid g = *this;
  for (int a = 0; a < dim_; ++a) {
    auto& ax = g.axes_[static_cast<std::size_t>(a)];
    ax.lo += offset[static_cast<std::size_t>(a)];
    ax.hi += offset[static_cast<std::size_t>(a)];
  }
  return g;
}

double Grid::min_spacing() const {
  double h = axes_[0].spacing();
  if (dim_ == 2) h = std::min(h, axes_[1].spacing());
  return h;
}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvariantError("field size " + std::to_string(values_.size()) +
                         " does not match grid size " +
                         std::to_string(grid_.size()));
  }
  bool any_finite = false;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (std::isnan(v)) {
      throw InvariantError("field value at node " + std::to_string(k) +
                           " is NaN");
    }
    if (v == -kInf) {
      throw InvariantError("field value at node " + std::to_string(k) +
                           " is -inf");
    }
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw InvariantError("field has no finite node");
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double integrate(const Grid& grid, std::span<const double> values) {
  double s = 0.0;
  if (grid.dim() == 1) {
    const std::size_t n = values.size();
    for (std::size_t i = 1; i + 1 < n; ++i) s += values[i];
    s += 0.5 * (values[0] + values[n - 1]);
    s *= grid.axis(0).spacing();
  } else {
    for (std::size_t k = 0; k < values.size(); ++k) {
      s += grid.weight(k) * values[k];
    }
  }
  if (!std::isfinite(s)) throw RangeError("integral is not finite");
  return s;
}

double integrate(const Field& f) { return integrate(f.grid(), f.values()); }

double interp(const Field& f, const Point& x) {
  const Grid& g = f.grid();
  if (!g.contains(x)) throw DomainError("interpolation point outside grid box");
  const auto v = f.values();
  const Locate lx = locate(g.axis(0), x[0]);
  if (g.dim() == 1) {
    if (lx.t == 0.0) return v[lx.i];
    if (lx.t == 1.0) return v[lx.i + 1];
    return (1.0 - lx.t) * v[lx.i] + lx.t * v[lx.i + 1];
  }
  const Locate ly = locate(g.axis(1), x[1]);
  double s = 0.0;
  for (int di = 0; di < 2; ++di) {
    const double wx = di == 0 ? 1.0 - lx.t : lx.t;
    if (wx == 0.0) continue;
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj == 0 ? 1.0 - ly.t : ly.t;
      if (wy == 0.0) continue;
      const double w = wx * wy;
      const double val = v[g.index(lx.i + static_cast<std::size_t>(di),
                                   ly.i + static_cast<std::size_t>(dj))];
      s += w == 1.0 ? val : w * val;
    }
  }
  return s;
}

double interp(const Field& f, double x) { return interp(f, Point{x, 0.0}); }

Field linear_combination(double a, const Field& f, double b, const Field& g) {
  if (!(f.grid() == g.grid())) {
    throw DomainError("linear_combination: fields live on different grids");
  }
  std::vector<double> v(f.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a * f[k] + b * g[k];
  return Field(f.grid(), std::move(v));
}

Field resample(const Field& f, const Grid& target, double outside) {
  if (f.grid() == target) return f;
  std::vector<double> v(target.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point p = target.node(k);
    v[k] = f.grid().contains(p) ? interp(f, p) : outside;
  }
  return Field(target, std::move(v));
}

Grid common_grid(const Grid& a, const Grid& b, std::size_t node_cap) {
  if (a.dim() != b.dim()) throw DomainError("grids of different dimension");
  if (a == b) return a;
  std::array<Axis, 2> axes{};
  for (int d = 0; d < a.dim(); ++d) {
    const Axis& x = a.axis(d);
    const Axis& y = b.axis(d);
    if (x.hi < y.lo || y.hi < x.lo) {
      throw DomainError("grid boxes are disjoint");
    }
    const double lo = std::min(x.lo, y.lo);
    const double hi = std::max(x.hi, y.hi);
    const double h = std::min(x.spacing(), y.spacing());
    const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
    axes[static_cast<std::size_t>(d)] = Axis{lo, hi, std::max<std::size_t>(cells + 1, 3)};
  }
  if (a.dim() == 1) return Grid::line(axes[0].lo, axes[0].hi, axes[0].n, node_cap);
  return Grid::plane(axes[0], axes[1], node_cap);
}

}  // namespace momlab
