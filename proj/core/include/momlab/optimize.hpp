#pragma once

// Small scalar numerics shared by several modules.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace momlab {

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for a minimum of a unimodal f on [a, b].
Minimum golden_section(const std::function<double(double)>& f, double a,
                       double b, double xtol = 1e-10, int max_iter = 200);

/// Coarse scan with `steps` equal steps, then golden-section refinement in the
/// bracket around the best scan point.
Minimum scan_then_golden(const std::function<double(double)>& f, double a,
                         double b, std::size_t steps, double xtol = 1e-10);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
Quadrature gauss_legendre_unit(std::size_t n);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool defined = false;  // false with fewer than two distinct abscissae
};

/// Ordinary least squares y ≈ slope·x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace momlab
