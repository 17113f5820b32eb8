#include "momlab/optimize.hpp"

#include <cmath>
#include <numbers>

#include "momlab/errors.hpp"

namespace momlab {

Minimum golden_section(const std::function<double(double)>& f, double a,
                       double b, double xtol, int max_iter) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

Minimum scan_then_golden(const std::function<double(double)>& f, double a,
                         double b, std::size_t steps, double xtol) {
  if (steps < 2) steps = 2;
  const double h = (b - a) / static_cast<double>(steps);
  std::size_t best = 0;
  double fbest = f(a);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  const double lo = a + h * static_cast<double>(best == 0 ? 0 : best - 1);
  const double hi = a + h * static_cast<double>(best == steps ? steps : best + 1);
  Minimum m = golden_section(f, lo, hi, xtol);
  if (fbest < m.value) m = {a + h * static_cast<double>(best), fbest};
  return m;
}

Quadrature gauss_legendre_unit(std::size_t n) {
  if (n == 0) throw ParameterError("quadrature needs at least one node");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const auto kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = 0.5 * (1.0 - x);
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[i] = 0.5 * w;
    q.weights[n - 1 - i] = 0.5 * w;
  }
  return q;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.defined = true;
  return fit;
}

}  // namespace momlab
