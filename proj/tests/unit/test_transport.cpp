#include <doctest.h>

#include <cmath>

#include "momlab/errors.hpp"
#include "momlab/transport.hpp"
#include "support.hpp"

using namespace momlab;
using momlab::testing::gaussian;
using momlab::testing::Rng;

namespace {
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse normal CDF by bisection.
double normal_quantile(double t) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

AtomicMeasure dirac(double a) { return AtomicMeasure({{{a, 0}, 1.0}}); }
}  // namespace

TEST_CASE("Gaussian quantiles match the inverse CDF") {
  const Grid g = Grid::line(-10, 10, 8001);
  const QuantileFunction q(gaussian(g));
  for (double t : {0.001, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999}) {
    CHECK(q(t) == doctest::Approx(normal_quantile(t)).epsilon(1e-4));
  }
  CHECK(q.from_right(1e-9) == doctest::Approx(-normal_quantile(1e-9)).epsilon(1e-3));
  CHECK_THROWS_AS(q(0.0), DomainError);
}

TEST_CASE("survival inverts the quantile function") {
  Rng rng(41);
  const Grid g = Grid::line(-6, 6, 1201);
  const Density d = rng.random_density(g, 1.5);
  const QuantileFunction q(d);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(1e-4, 1 - 1e-4);
    CHECK(q.survival(q(t)) == doctest::Approx(1 - t).epsilon(1e-9));
  }
  const QuantileFunction a(AtomicMeasure({{{-1, 0}, 0.25}, {{2, 0}, 0.75}}));
  CHECK(a.survival(-2) == doctest::Approx(1.0));
  CHECK(a.survival(-1) == doctest::Approx(0.75));
  CHECK(a.survival(2) == 0.0);
}

TEST_CASE("atomic quantiles are the generalized inverse") {
  const QuantileFunction q(AtomicMeasure({{{-1, 0}, 0.5}, {{1, 0}, 0.5}}));
  CHECK(q(0.25) == -1.0);
  CHECK(q(0.5) == -1.0);
  CHECK(q(0.5000001) == 1.0);
  CHECK(q(0.99) == 1.0);
}

TEST_CASE("Wasserstein distances against closed forms") {
  const Grid g = Grid::line(-10, 10, 4001);
  CHECK(wasserstein_1d(gaussian(g), gaussian(g), 2.0) == 0.0);
  for (double p : {1.0, 2.0, 3.5}) CHECK(wasserstein_1d(dirac(-0.5), dirac(2.0), p) == doctest::Approx(2.5));
  CHECK(wasserstein_1d(gaussian(g), gaussian(g, 0.7), 2.0) == doctest::Approx(0.7).epsilon(1e-3));
  // W_2 between centered Gaussians is the difference of standard deviations
  CHECK(wasserstein_1d(gaussian(g), gaussian(g, 0, 2.0), 2.0) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("Wasserstein distance is a metric, monotone in p") {
  Rng rng(42);
  const Grid g = Grid::line(-8, 8, 801);
  for (int i = 0; i < 20; ++i) {
    const Density a = rng.random_density(g, 2), b = rng.random_density(g, 2), c = rng.random_density(g, 2);
    const double ab = wasserstein_1d(a, b, 2), ba = wasserstein_1d(b, a, 2);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= wasserstein_1d(a, c, 2) + wasserstein_1d(c, b, 2) + 1e-12);
    CHECK(wasserstein_1d(a, b, 1) <= ab + 1e-12);
  }
}

TEST_CASE("maximal correlation against closed forms") {
  const Grid g = Grid::line(-10, 10, 4001);
  CHECK(max_correlation(gaussian(g), gaussian(g)) == doctest::Approx(1.0).epsilon(1e-3));
  const Grid wide = Grid::line(-30, 30, 6001);
  const Density laplace = momlab::testing::density(wide, [](double x) { return std::exp(-std::abs(x)); });
  const AtomicMeasure two({{{-1, 0}, 0.5}, {{1, 0}, 0.5}});
  CHECK(max_correlation(laplace, two) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(max_correlation(laplace, dirac(0.0)) == 0.0);
}

TEST_CASE("maximal correlation dominates the independent coupling") {
  Rng rng(43);
  const Grid g = Grid::line(-8, 8, 801);
  for (int i = 0; i < 10; ++i) {
    const Density a = rng.random_density(g, 2), b = rng.random_density(g, 2);
    CHECK(max_correlation(a, b) >= barycenter(a)[0] * barycenter(b)[0] - 1e-9);
  }
}

TEST_CASE("geodesic interpolates quantiles") {
  const Grid g = Grid::line(-10, 14, 4801);
  const AtomicMeasure mid = geodesic(dirac(0.0), dirac(2.0), 0.5);
  REQUIRE(mid.atoms().size() == 1);
  CHECK(mid.atoms()[0].x[0] == doctest::Approx(1.0));
  const AtomicMeasure quarter = geodesic(gaussian(g), gaussian(g, 4.0), 0.25);
  CHECK(wasserstein_1d(quarter, gaussian(g, 1.0), 2.0) < 1e-2);
  CHECK(wasserstein_1d(geodesic(gaussian(g), gaussian(g, 4.0), 0.0), gaussian(g), 2.0) < 1e-2);
}

TEST_CASE("second-moment gap along geodesics against closed forms") {
  const Grid g = Grid::line(-10, 14, 4801);
  CHECK(m2_geodesic_gap(dirac(0.0), dirac(2.0), 0.5) == doctest::Approx(0.5));
  CHECK(m2_geodesic_gap(gaussian(g), gaussian(g, 4.0), 0.5) == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(m2_geodesic_gap(gaussian(g), gaussian(g, 4.0), 0.0) == doctest::Approx(0.0));
  CHECK(m2_geodesic_gap(gaussian(g), gaussian(g, 4.0), 1.0) == doctest::Approx(0.0));
}

TEST_CASE("second-moment gap equals t(1-t)W2^2/2") {
  Rng rng(44);
  const Grid g = Grid::line(-8, 8, 801);
  for (int i = 0; i < 10; ++i) {
    const Density a = rng.random_density(g, 2), b = rng.random_density(g, 2);
    const double t = rng.uniform(0, 1);
    const double w = wasserstein_1d(a, b, 2);
    CHECK(m2_geodesic_gap(a, b, t) == doctest::Approx(0.5 * t * (1 - t) * w * w).epsilon(1e-9));
  }
}

TEST_CASE("coupling bound: zero for equal measures, rejects q >= p") {
  const Grid g = Grid::line(-8, 8, 801);
  CHECK(l1_moment_coupling_bound(gaussian(g), gaussian(g), 4, 2).bound == 0.0);
  CHECK_THROWS_AS(l1_moment_coupling_bound(gaussian(g), gaussian(g, 1), 2, 2), ParameterError);
  CHECK_THROWS_AS(l1_moment_coupling_bound(gaussian(g), gaussian(g, 1), 1, 0.5), ParameterError);
}

TEST_CASE("coupling bound is the minimum over R of its objective") {
  Rng rng(45);
  const Grid g = Grid::line(-8, 8, 801);
  for (int i = 0; i < 10; ++i) {
    const Density a = rng.random_density(g, 2), b = rng.random_density(g, 2);
    const double p = 4, q = 2;
    const CouplingBound cb = l1_moment_coupling_bound(a, b, p, q);
    const double alpha = 0.5 * l1_distance(a, b);
    const double mp = moments(a, p) + moments(b, p);
    double best = kInf;
    for (double lr = -10; lr <= 10; lr += 1e-3) {
      const double r = std::exp(lr);
      best = std::min(best, std::pow(2 * r, q) * alpha + std::pow(2, q - 1) * std::pow(r, q - p) * mp);
    }
    CHECK(cb.bound == doctest::Approx(std::pow(best, 1 / q)).epsilon(1e-6));
    CHECK(wasserstein_1d(a, b, q) <= cb.bound);
  }
}
