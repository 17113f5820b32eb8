#pragma once

// Uniform tensor grids in dimension 1 and 2 and scalar fields over them.

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace momlab {

/// A point in R^1 or R^2; the second coordinate is ignored in dimension one.
using Point = std::array<double, 2>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultNodeCap = 10'000'000;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 3;

  double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
  double node(std::size_t i) const {
    if (i + 1 == n) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  double width() const { return hi - lo; }
  bool operator==(const Axis&) const = default;
};

class Grid {
 public:
  /// 1D grid on [lo, hi] with n nodes.
  static Grid line(double lo, double hi, std::size_t n,
                   std::size_t node_cap = kDefaultNodeCap);
  /// 2D tensor grid.
  static Grid plane(const Axis& x, const Axis& y,
                    std::size_t node_cap = kDefaultNodeCap);

  int dim() const { return dim_; }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  std::size_t size() const;
  /// Flat index of node (i, j); storage is row-major over (x index, y index).
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * axes_[1].n + j;
  }
  std::size_t ix(std::size_t k) const { return dim_ == 1 ? k : k / axes_[1].n; }
  std::size_t iy(std::size_t k) const { return dim_ == 1 ? 0 : k % axes_[1].n; }
  Point node(std::size_t k) const;
  /// Trapezoid weight of node k (product of per-axis weights, spacing included).
  double weight(std::size_t k) const;
  bool contains(const Point& p) const;
  Grid shifted(const Point& offset) const;
  /// Smallest spacing across axes.
  double min_spacing() const;

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dim, std::array<Axis, 2> axes) : dim_(dim), axes_(axes) {}
  int dim_ = 1;
  std::array<Axis, 2> axes_{};
};

/// Real values on every node of a Grid. +∞ marks nodes outside an effective
/// domain; NaN and −∞ are rejected.
class Field {
 public:
  Field(Grid grid, std::vector<double> values);

  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point p = grid.node(k);
      if constexpr (std::is_invocable_v<F, double>) {
        v[k] = f(p[0]);
      } else {
        v[k] = f(p[0], p[1]);
      }
    }
    return Field(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  bool all_finite() const;

  /// Applies `op` to every value and returns the result on the same grid.
  template <class Op>
  Field map(Op&& op) const {
    std::vector<double> v(values_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(values_[k]);
    return Field(grid_, std::move(v));
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Trapezoid rule over the whole grid box.
double integrate(const Field& f);
/// Trapezoid rule applied to raw node values laid out on `grid`.
double integrate(const Grid& grid, std::span<const double> values);

/// Piecewise-linear (1D) or bilinear (2D) interpolation; exact at nodes.
double interp(const Field& f, const Point& x);
double interp(const Field& f, double x);

/// a·f + b·g on a common grid.
Field linear_combination(double a, const Field& f, double b, const Field& g);

/// Values of `f` resampled on `target`; points outside f's box receive `outside`.
Field resample(const Field& f, const Grid& target, double outside = 0.0);

/// Smallest grid containing both boxes with the finer spacing per axis.
Grid common_grid(const Grid& a, const Grid& b,
                 std::size_t node_cap = kDefaultNodeCap);

}  // namespace momlab
