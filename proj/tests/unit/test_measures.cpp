#include <doctest.h>

#include <cmath>
#include <sstream>
#include <variant>

#include "momlab/errors.hpp"
#include "momlab/field_io.hpp"
#include "momlab/measure_io.hpp"
#include "momlab/measures.hpp"
#include "support.hpp"

using namespace momlab;
using momlab::testing::gaussian;
using momlab::testing::Rng;

namespace {
const double kPi = 3.141592653589793;
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
AtomicMeasure two_atoms() { return AtomicMeasure({{{-1, 0}, 0.5}, {{1, 0}, 0.5}}); }
}  // namespace

TEST_CASE("density validation") {
  const Grid g = Grid::line(0, 1, 11);
  CHECK_NOTHROW(Density(Field::sample(g, [](double) { return 1.0; })));
  CHECK_THROWS_AS(Density(Field::sample(g, [](double) { return 2.0; })), InvariantError);
  CHECK_THROWS_AS(Density(Field::sample(g, [](double x) { return x < 0.5 ? -1.0 : 3.0; })), InvariantError);
  CHECK(integrate(Density::normalized(Field::sample(g, [](double x) { return 5 * x; })).field()) ==
        doctest::Approx(1.0));
}

TEST_CASE("atomic measures are sorted and validated") {
  const AtomicMeasure m({{{2, 0}, 0.25}, {{-1, 0}, 0.75}});
  CHECK(m.atoms()[0].x[0] == -1.0);
  CHECK_THROWS(AtomicMeasure({{{0, 0}, 0.5}, {{1, 0}, 0.6}}));
  CHECK_THROWS(AtomicMeasure({{{0, 0}, 0.5}, {{0, 0}, 0.5}}));
  const AtomicMeasure merged = AtomicMeasure::normalized({{{0, 0}, 1.0}, {{0, 0}, 1.0}, {{1, 0}, 2.0}});
  CHECK(merged.atoms().size() == 2);
  CHECK(merged.atoms()[0].w == doctest::Approx(0.5));
}

TEST_CASE("gibbs of x^2/2 is the standard normal density") {
  const Grid g = Grid::line(-8, 8, 4001);
  const Density rho = gibbs(Potential(Field::sample(g, [](double x) { return 0.5 * x * x; })), 0.0);
  CHECK(rho[2000] == doctest::Approx(1.0 / std::sqrt(2 * kPi)).epsilon(1e-6));
  CHECK(rho.log_normalizer() == doctest::Approx(0.5 * std::log(2 * kPi)).epsilon(1e-8));
}

TEST_CASE("gibbs of |x| is the Laplace density and ignores constants") {
  const Grid g = Grid::line(-30, 30, 6001);
  const Field f = Field::sample(g, [](double x) { return std::abs(x); });
  const Density a = gibbs(Potential(f), 0.0);
  const Density b = gibbs(Potential(f.map([](double v) { return v + 123.0; })), 0.0);
  CHECK(a[3000] == doctest::Approx(0.5).epsilon(1e-5));
  for (std::size_t k = 0; k < g.size(); k += 97) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
}

TEST_CASE("gibbs with alpha adds the Gaussian weight") {
  const Grid g = Grid::line(-8, 8, 2001);
  const Density rho = gibbs(Potential(Field::sample(g, [](double x) { return 0.5 * x * x; })), 1.0);
  CHECK(moments(rho, 2.0) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("gibbs is stable under large shifts and rejects an empty domain") {
  const Grid g = Grid::line(-1, 1, 11);
  const Density d = gibbs(Potential(Field::sample(g, [](double) { return 0.0; })).plus(-1e6), 0.0);
  CHECK(d[5] == doctest::Approx(0.5));
  CHECK(d.log_normalizer() == doctest::Approx(std::log(2.0) + 1e6));
  CHECK_THROWS_AS(gibbs(Potential(Field::sample(g, [](double) { return kInf; })), 0.0),
                  InvariantError);
}

TEST_CASE("moment measure of x^2/2 is the standard normal") {
  const Grid g = Grid::line(-8, 8, 1601);
  const Measure m = moment_measure(Potential(Field::sample(g, [](double x) { return 0.5 * x * x; })), 0.0);
  REQUIRE(std::holds_alternative<Density>(m));
  CHECK(moments(m, 2.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(barycenter(m)[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("moment measure of |x| is two atoms of mass one half") {
  const Grid g = Grid::line(-30, 30, 6001);
  const Measure m = moment_measure(Potential(Field::sample(g, [](double x) { return std::abs(x); })), 0.0);
  REQUIRE(std::holds_alternative<AtomicMeasure>(m));
  const auto& atoms = std::get<AtomicMeasure>(m).atoms();
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].x[0] == doctest::Approx(-1.0));
  CHECK(atoms[1].x[0] == doctest::Approx(1.0));
  CHECK(atoms[0].w == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("moment measure is invariant under translating the potential") {
  const Grid g = Grid::line(-10, 10, 2001);
  const Potential a(Field::sample(g, [](double x) { return std::sqrt(1 + x * x); }));
  const Potential b(Field::sample(g, [](double x) { return std::sqrt(1 + (x - 0.5) * (x - 0.5)); }));
  const Measure ma = moment_measure(a, 0.0), mb = moment_measure(b, 0.0);
  CHECK(moments(ma, 2.0) == doctest::Approx(moments(mb, 2.0)).epsilon(2e-3));
  CHECK(theta(ma) == doctest::Approx(theta(mb)).epsilon(2e-3));
}

TEST_CASE("moments, entropy and barycenter against closed forms") {
  const Grid g = Grid::line(-10, 10, 4001);
  const Density gam = gaussian(g);
  CHECK(moments(gam, 2.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(moments(two_atoms(), 4.0) == doctest::Approx(1.0));
  CHECK(moments(AtomicMeasure({{{0, 0}, 1.0}}), 1.0) == 0.0);
  CHECK(entropy(gam) == doctest::Approx(-0.5 * std::log(2 * kPi * std::exp(1.0))).epsilon(1e-4));
  CHECK(entropy(momlab::testing::density(Grid::line(0, 2, 201), [](double) { return 1.0; })) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-9));
  CHECK(barycenter(gaussian(g, 2.0))[0] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(barycenter(AtomicMeasure({{{3, 0}, 1.0}}))[0] == 3.0);
}

TEST_CASE("center moves the barycenter to the origin") {
  const Grid g = Grid::line(-10, 10, 2001);
  const Density c = center(gaussian(g, 1.7, 0.8));
  CHECK(std::abs(barycenter(c)[0]) < 1e-10);
  const Measure a = center(Measure(AtomicMeasure({{{3, 0}, 1.0}})));
  CHECK(std::get<AtomicMeasure>(a).atoms()[0].x[0] == 0.0);
}

TEST_CASE("theta against closed forms") {
  const Grid g = Grid::line(-10, 10, 4001);
  CHECK(theta(gaussian(g)) == doctest::Approx(std::sqrt(2 / kPi)).epsilon(1e-4));
  CHECK(theta(two_atoms()) == doctest::Approx(1.0));
  CHECK(theta(AtomicMeasure({{{0, 0}, 1.0}})) == 0.0);
}

TEST_CASE("2D theta of an anisotropic Gaussian picks the narrow direction") {
  const Grid g = Grid::plane({-6, 6, 241}, {-6, 6, 241});
  const double sx = 1.0, sy = 0.5;
  const Density rho = Density::normalized(Field::sample(g, [&](double x, double y) {
    return std::exp(-0.5 * (x * x / (sx * sx) + y * y / (sy * sy)));
  }));
  CHECK(theta(rho) == doctest::Approx(sy * std::sqrt(2 / kPi)).epsilon(2e-3));
}

TEST_CASE("L1 distance against closed forms") {
  const Grid g = Grid::line(-10, 10, 4001);
  CHECK(l1_distance(gaussian(g), gaussian(g)) == 0.0);
  CHECK(l1_distance(gaussian(g), gaussian(g, 0.1)) == doctest::Approx(2 * (2 * normal_cdf(0.05) - 1)).epsilon(1e-3));
  const Density u0 = momlab::testing::density(Grid::line(0, 1, 101), [](double) { return 1.0; });
  const Density u1 = momlab::testing::density(Grid::line(1, 2, 101), [](double) { return 1.0; });
  CHECK(l1_distance(u0, u1) == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("L1 distance modulo translation recovers a shift") {
  const Grid g = Grid::line(-10, 10, 2001);
  const TranslationFit fit = l1_dist_mod_translation(gaussian(g), gaussian(g, 0.3));
  CHECK(fit.x0 == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(fit.distance < 2 * g.axis(0).spacing());
  CHECK_FALSE(fit.at_bound);
  const TranslationFit same = l1_dist_mod_translation(gaussian(g), gaussian(g));
  CHECK(same.x0 == 0.0);
  CHECK(same.distance == 0.0);
}

TEST_CASE("translation cannot reduce a symmetric variance mismatch") {
  const Grid g = Grid::line(-10, 10, 2001);
  const Density a = gaussian(g), b = gaussian(g, 0.0, 1.1);
  const TranslationFit fit = l1_dist_mod_translation(a, b);
  CHECK(std::abs(fit.x0) < 1e-3);
  CHECK(fit.distance == doctest::Approx(l1_distance(a, b)).epsilon(1e-3));
}

TEST_CASE("translation fit flags optima on the shift limit") {
  const Grid g = Grid::line(-10, 10, 2001);
  const TranslationFit fit = l1_dist_mod_translation(gaussian(g), gaussian(g, 5.0), 0.1);
  CHECK(fit.at_bound);
}

TEST_CASE("L1 translation objective is never beaten by a brute-force scan") {
  Rng rng(31);
  const Grid g = Grid::line(-6, 6, 601);
  for (int t = 0; t < 5; ++t) {
    const Density a = rng.random_density(g, 1.0), b = rng.random_density(g, 1.0);
    const TranslationFit fit = l1_dist_mod_translation(a, b);
    for (double x0 = -1.2; x0 <= 1.2; x0 += 0.05) {
      std::vector<double> d(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double y = g.node(k)[0] + x0;
        d[k] = std::abs(a[k] - (std::abs(y) <= 6 ? interp(b.field(), y) : 0.0));
      }
      CHECK(fit.distance <= integrate(g, d) + 1e-12);
    }
  }
}

TEST_CASE("integrating against a measure") {
  const Grid g = Grid::line(-8, 8, 1601);
  const Field x2 = Field::sample(g, [](double x) { return x * x; });
  CHECK(integrate_against(x2, gaussian(g)) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(integrate_against(x2, two_atoms()) == doctest::Approx(1.0).epsilon(1e-4));
  const Field bounded(Grid::line(-2, 2, 5), {kInf, 0.0, 0.0, 0.0, kInf});
  CHECK_THROWS_AS(integrate_against(bounded, gaussian(Grid::line(-2, 2, 5))), DomainError);
  CHECK_THROWS_AS(integrate_against(x2, AtomicMeasure({{{9, 0}, 1.0}})), DomainError);
}

TEST_CASE("measure files round-trip and report bad lines") {
  const Grid g = Grid::line(-3, 3, 61);
  std::stringstream ss;
  write_measure(ss, gaussian(g));
  const Measure back = read_measure(ss);
  REQUIRE(std::holds_alternative<Density>(back));
  CHECK(moments(back, 2.0) == doctest::Approx(moments(gaussian(g), 2.0)).epsilon(1e-12));

  std::stringstream at;
  write_measure(at, two_atoms());
  const Measure ab = read_measure(at);
  REQUIRE(std::holds_alternative<AtomicMeasure>(ab));
  CHECK(std::get<AtomicMeasure>(ab).atoms().size() == 2);

  std::stringstream unnorm("atoms\n-1,1\n1,3\n");
  CHECK(std::get<AtomicMeasure>(read_measure(unnorm)).atoms()[1].w == doctest::Approx(0.75));

  std::stringstream bad("# comment\natoms\nx,weight\n0,0.5\nfoo,0.5\n");
  try {
    read_measure(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  std::stringstream badhead("mystery\n");
  CHECK_THROWS_AS(read_measure(badhead), ParseError);
}

TEST_CASE("a bare field file reads as a density with file line numbers") {
  const Grid g = Grid::line(-3, 3, 61);
  std::stringstream ss;
  write_field(ss, gaussian(g).field());
  const Measure m = read_measure(ss);
  REQUIRE(std::holds_alternative<Density>(m));
  CHECK(moments(m, 2.0) == doctest::Approx(moments(gaussian(g), 2.0)).epsilon(1e-12));
  std::stringstream bad("# rho\nx,value\n0,1\n0.5,zz\n1,1\n");
  try {
    read_measure(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}
