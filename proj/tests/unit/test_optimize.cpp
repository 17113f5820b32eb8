#include <doctest.h>

#include <cmath>
#include <vector>

#include "momlab/optimize.hpp"

using namespace momlab;

TEST_CASE("golden section finds the minimum of a smooth unimodal function") {
  const Minimum m = golden_section([](double x) { return (x - 1.3) * (x - 1.3) + 2.0; }, -5, 5);
  CHECK(m.x == doctest::Approx(1.3).epsilon(1e-8));
  CHECK(m.value == doctest::Approx(2.0));
}

TEST_CASE("scan then golden escapes a local minimum") {
  const auto f = [](double x) { return std::cos(3 * x) + 0.1 * x * x; };
  const Minimum m = scan_then_golden(f, -4, 4, 400);
  // global minimizers are near ±1.03; the local one near 3 is worse
  CHECK(std::abs(std::abs(m.x) - 1.0) < 0.1);
  for (double x = -4; x <= 4; x += 0.01) CHECK(m.value <= f(x) + 1e-12);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly on [0,1]") {
  for (std::size_t n : {1u, 2u, 5u, 16u}) {
    const Quadrature q = gauss_legendre_unit(n);
    REQUIRE(q.nodes.size() == n);
    double wsum = 0.0;
    for (double w : q.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    const int deg = static_cast<int>(2 * n - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.nodes[i], deg);
    CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
  }
}

TEST_CASE("Gauss-Legendre nodes are symmetric and interior") {
  const Quadrature q = gauss_legendre_unit(16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(q.nodes[i] > 0.0);
    CHECK(q.nodes[i] < 1.0);
    CHECK(q.nodes[i] + q.nodes[15 - i] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("line fit recovers an exact line and flags degenerate input") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const LineFit f = fit_line(x, y);
  CHECK(f.defined);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  const std::vector<double> same{2, 2, 2};
  CHECK_FALSE(fit_line(same, same).defined);
}
