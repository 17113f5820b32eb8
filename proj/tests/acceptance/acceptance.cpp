// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "momlab/convexlab.hpp"
#include "momlab/errors.hpp"
#include "momlab/functionals.hpp"
#include "momlab/measures.hpp"
#include "momlab/momsolve.hpp"
#include "momlab/optimize.hpp"
#include "momlab/transport.hpp"
#include "support.hpp"

using namespace momlab;
using momlab::testing::density;
using momlab::testing::gaussian;
using momlab::testing::potential;
using momlab::testing::Rng;
using momlab::testing::sample;

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Brascamp-Lieb deficit is nonnegative.
Outcome bl_nonnegativity() {
  constexpr double kTol = 1e-8;
  constexpr double kBudget = 30.0;
  const auto t0 = Clock::now();
  struct Fixture {
    Grid grid;
    std::function<double(double)> phi;
  };
  const std::vector<Fixture> fixtures = {
      {Grid::line(-10, 10, 2001), [](double x) { return 0.5 * x * x; }},
      {Grid::line(-8, 8, 2001), [](double x) { return 0.5 * x * x + x * x * x * x / 12; }},
      {Grid::line(-40, 40, 4001), [](double x) { return std::sqrt(0.01 + x * x); }},
  };
  Rng rng(101);
  double worst = kInf;
  for (const auto& fx : fixtures) {
    const Potential phi = potential(fx.grid, fx.phi);
    for (int i = 0; i < 200; ++i) {
      const DeficitReport r = bl_deficit(sample(fx.grid, rng.smooth_function()), phi);
      worst = std::min(worst, r.deficit);
    }
  }
  const double t = seconds_since(t0);
  return {worst >= -kTol && t < kBudget,
          fmt("min deficit %.3e (>= -1e-8), %.2f s (< 30 s)", worst, t)};
}

// 2. f = aφ' + b is an equality case.
Outcome bl_equality_manifold() {
  constexpr double kTol = 1e-3;
  const Grid g = Grid::line(-8, 8, 4001);
  const Potential phi = potential(g, [](double x) { return 0.5 * x * x + x * x * x * x / 12; });
  Rng rng(102);
  double worst_def = 0.0, worst_dist = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    const Field f = sample(g, [=](double x) { return a * (x + x * x * x / 3) + b; });
    worst_def = std::max(worst_def, std::abs(bl_deficit(f, phi).deficit));
    worst_dist = std::max(worst_dist, dist_to_bl_optimizers(f, phi).distance);
  }
  return {worst_def <= kTol && worst_dist <= kTol,
          fmt("max |deficit| %.3e, max dist %.3e (<= 1e-3)", worst_def, worst_dist)};
}

// 3. Distance scales like deficit^{1/2}.
Outcome bl_stability_exponent() {
  constexpr double kTarget = 0.5, kTol = 0.05;
  const Grid g = Grid::line(-10, 10, 20001);
  const Potential phi = potential(g, [](double x) { return 0.5 * x * x; });
  const std::vector<std::function<double(double)>> perturb = {
      [](double x) { return std::sin(x); },
      [](double x) { return x * x; },
      [](double x) { return std::tanh(x); },
  };
  bool ok = true;
  std::string slopes;
  for (const auto& gfun : perturb) {
    std::vector<double> lx, ly;
    for (int i = 0; i < 9; ++i) {
      const double eps = std::pow(10.0, -3.0 + 2.0 * i / 8.0);
      const Field f = sample(g, [&](double x) { return x + eps * gfun(x); });
      lx.push_back(std::log(bl_deficit(f, phi).deficit));
      ly.push_back(std::log(dist_to_bl_optimizers(f, phi).distance));
    }
    const double s = fit_line(lx, ly).slope;
    ok = ok && std::abs(s - kTarget) <= kTol;
    slopes += fmt(" %.4f", s);
  }
  return {ok, "slopes (sin, x^2, tanh):" + slopes + " (0.5 +- 0.05)"};
}

// 4. Prékopa-Leindler deficit of the sup-convolution triple is δ²δ_BL/2.
Outcome pl_expansion() {
  constexpr double kLo = 0.9, kHi = 1.1, kLinear = 1e-8;
  const Grid g = Grid::line(-8, 8, 64001);
  const Potential phi = potential(g, [](double x) { return 0.5 * x * x + 0.5 * kLog2Pi; });
  const Field sq = sample(g, [](double x) { return x * x; });
  const Field lin = sample(g, [](double x) { return x; });
  const double half_bl = 0.5 * bl_deficit(sq, phi).deficit;
  const SupConvolutionOptions opts{true, 10.0};
  double lo = kInf, hi = 0.0, lin_worst = 0.0;
  for (double delta : {1e-3, 2e-3, 5e-3, 1e-2}) {
    const BlTriple t = bl_triple(sq, phi, delta, opts);
    const double r = pl_deficit(t.u, t.v, t.w, 0.5, false) / (delta * delta) / half_bl;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    const BlTriple tl = bl_triple(lin, phi, delta, opts);
    lin_worst = std::max(lin_worst, std::abs(pl_deficit(tl.u, tl.v, tl.w, 0.5, false)));
  }
  return {lo >= kLo && hi <= kHi && lin_worst <= kLinear,
          fmt("ratio to delta^2*dBL/2 in [%.4f, %.4f] (within [0.9, 1.1]); f=x deficit %.2e (<= 1e-8)",
              lo, hi, lin_worst)};
}

// 5. Variations of J agree with centered finite differences.
Outcome variation_formulas() {
  constexpr double kFirst = 1e-5, kSecond = 1e-3;
  const Grid g = Grid::line(-6, 6, 240001);
  const Grid dual = Grid::line(-8, 8, 1601);
  Rng rng(105);
  double w1 = 0.0, w2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(0.7, 1.5), c = rng.uniform(0, 0.1), b = rng.uniform(-0.3, 0.3);
    const Potential phi =
        potential(g, [=](double x) { return 0.5 * a * x * x + c * x * x * x * x / 12 + b * x; });
    const double c1 = rng.uniform(-0.2, 0.2), c2 = rng.uniform(0, 0.1);
    const double c3 = rng.uniform(-0.1, 0.1), fr = rng.uniform(0.5, 1.5);
    const Field v = sample(g, [=](double x) { return c1 * x + c2 * x * x / 2 + c3 * std::sin(fr * x); });
    const Density mu = gaussian(g, rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.3));
    const VariationReport r = variation_report(phi, v, mu, 0.0, dual, 1e-4, 1e-2);
    w1 = std::max(w1, std::abs(r.first - r.fd_first));
    w2 = std::max(w2, std::abs(r.second - r.fd_second));
  }
  return {w1 <= kFirst && w2 <= kSecond,
          fmt("max |first - fd| %.2e (<= 1e-5), max |second - fd| %.2e (<= 1e-3)", w1, w2)};
}

// 6. Second-order Taylor identity along the segment.
Outcome backbone_identity() {
  constexpr double kTol = 1e-3;
  const Grid g = Grid::line(-6, 6, 24001);
  const Potential bar = potential(g, [](double x) { return 0.5 * x * x; });
  const Potential phi = potential(g, [](double x) { return 0.5 * x * x + 0.1 * x * x * x * x; });
  const BackboneReport r = backbone_gap(bar, phi, gaussian(g), 16, Grid::line(-8, 8, 401));
  const double d = std::abs(r.lhs - r.rhs);
  return {d <= kTol, fmt("lhs %.6f rhs %.6f |diff| %.2e (<= 1e-3)", r.lhs, r.rhs, d)};
}

// 7. J + E vanishes at solved optima.
Outcome strong_duality() {
  constexpr double kTol = 2e-3;
  const double j_gauss = 0.5 * kLog2Pi - 0.5;
  const double j_atoms = std::log(2.0);
  const Grid g = Grid::line(-10, 10, 4001);
  const SolveReport a = solve_moment_measure(gaussian(g), 0.0, g);
  const AtomicMeasure two({{{-1, 0}, 0.5}, {{1, 0}, 0.5}});
  const SolveReport b = solve_moment_measure(two, 0.0, Grid::line(-30, 30, 4001));
  const double err = std::max({std::abs(a.gap), std::abs(b.gap), std::abs(a.j_value - j_gauss),
                               std::abs(a.e_value + j_gauss), std::abs(b.j_value - j_atoms),
                               std::abs(b.e_value + j_atoms)});
  return {err <= kTol, fmt("gaps %.2e, %.2e; worst deviation from +-J* %.2e (<= 2e-3)", a.gap,
                           b.gap, err)};
}

// 8. Solver recovers the analytic fixtures.
Outcome solver_fixtures() {
  constexpr double kTol = 1e-2, kBudget = 10.0;
  const Grid g = Grid::line(-10, 10, 4001);
  const Density gam = gaussian(g);
  double worst_time = 0.0;
  auto timed = [&](const Measure& mu, double alpha, const Grid& grid) {
    const auto t0 = Clock::now();
    SolveReport r = solve_moment_measure(mu, alpha, grid);
    worst_time = std::max(worst_time, seconds_since(t0));
    return r;
  };
  bool ok = true;
  {
    const SolveReport r = timed(gam, 0.0, g);
    const Hessian h = second_derivative(r.psi);
    double dev = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (std::abs(g.node(k)[0]) < 8) dev = std::max(dev, std::abs(h.entries[0][k] - 1.0));
    }
    ok = ok && r.converged && dev <= kTol;
  }
  double atom_dev = 0.0;
  {
    const Grid g2 = Grid::line(-30, 30, 4001);
    const SolveReport r = timed(AtomicMeasure({{{-1, 0}, 0.5}, {{1, 0}, 0.5}}), 0.0, g2);
    const Gradient d = gradient(r.psi);
    for (std::size_t k = 0; k < g2.size(); ++k) {
      const double x = g2.node(k)[0];
      if (std::abs(x) > 0.05 && std::abs(x) < 25) {
        atom_dev = std::max(atom_dev, std::abs(d.components[0][k] - (x > 0 ? 1.0 : -1.0)));
      }
    }
    ok = ok && r.converged && atom_dev <= kTol;
  }
  double c_dev = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const SolveReport r = timed(gam, alpha, g);
    const Hessian h = second_derivative(r.psi);
    const double c = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha));
    // Curvature is read where ρ carries mass; the far tails are numerically empty.
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (r.rho[k] >= 1e-6) c_dev = std::max(c_dev, std::abs(h.entries[0][k] - c));
    }
    ok = ok && r.converged;
  }
  ok = ok && c_dev <= kTol && worst_time < kBudget;
  return {ok, fmt("two-atom slope dev %.2e, c_alpha dev %.2e (<= 1e-2); slowest solve %.2f s (< 10 s)",
                  atom_dev, c_dev, worst_time)};
}

// 9. Regularized solutions approach the unregularized one at rate α^{1/2}.
Outcome regularization_rate() {
  constexpr double kMinSlope = 0.5;
  const std::vector<double> alphas = {1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3};
  const Grid g = Grid::line(-10, 10, 4001);
  const RateFit a = regularization_path(gaussian(g), alphas, g);
  const RateFit b = regularization_path(AtomicMeasure({{{-1, 0}, 0.5}, {{1, 0}, 0.5}}), alphas,
                                        Grid::line(-30, 30, 4001));
  const bool ok = a.slope_defined && b.slope_defined && a.bound_holds && b.bound_holds &&
                  a.slope >= kMinSlope && b.slope >= kMinSlope;
  return {ok, fmt("slopes %.3f, %.3f (>= 0.5); 4*C*sqrt(alpha) bound ", a.slope, b.slope) +
                  (a.bound_holds && b.bound_holds ? "holds" : "violated")};
}

// 10. Exact W_q against the moment-coupling bound.
Outcome wasserstein_lemma() {
  const Grid g = Grid::line(-10, 10, 2001);
  Rng rng(110);
  std::size_t bad = 0;
  double min_slack = kInf;
  const double pq[3][2] = {{4, 1}, {4, 2}, {3, 2}};
  for (int i = 0; i < 100; ++i) {
    const Density mu = rng.random_density(g, 2.0), nu = rng.random_density(g, 2.0);
    for (const auto& e : pq) {
      const double w = wasserstein_1d(mu, nu, e[1]);
      const double bound = l1_moment_coupling_bound(mu, nu, e[0], e[1]).bound;
      min_slack = std::min(min_slack, bound - w);
      if (!(w <= bound)) ++bad;
    }
  }
  return {bad == 0, fmt("%.0f violations in 300 checks; min slack %.3e", static_cast<double>(bad),
                        min_slack)};
}

// 11. Second moment is 1-convex along W₂ geodesics.
Outcome geodesic_convexity() {
  constexpr double kTol = 1e-6;
  const Grid g = Grid::line(-10, 10, 2001);
  Rng rng(111);
  double worst = kInf;
  for (int i = 0; i < 100; ++i) {
    const Density mu = rng.random_density(g, 2.0), nu = rng.random_density(g, 2.0);
    for (int j = 1; j <= 9; ++j) worst = std::min(worst, m2_geodesic_gap(mu, nu, j / 10.0));
  }
  return {worst >= -kTol, fmt("min gap %.3e (>= -1e-6)", worst)};
}

// 12. Moment recursion for strongly convex potentials.
Outcome moment_recursion() {
  constexpr double kRel = 5e-3;
  const Grid g = Grid::line(-12, 12, 4801);
  const double df[] = {1, 3, 15, 105, 945};
  const auto rows = p_moment_bound_check(potential(g, [](double x) { return 0.5 * x * x; }), 1.0, 5);
  double rel = 0.0;
  for (std::size_t k = 0; k < 5; ++k) rel = std::max(rel, std::abs(rows[k].v2k / df[k] - 1.0));
  Rng rng(112);
  std::size_t failures = 0;
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(0.5, 2.0), c = rng.uniform(0, 0.05);
    const double d = rng.uniform(0, 1), b = rng.uniform(-1, 1);
    const Potential psi = potential(g, [=](double x) {
      return 0.5 * a * x * x + c * x * x * x * x + d * std::log(std::cosh(x)) + b * x;
    });
    for (const auto& r : p_moment_bound_check(psi, a, 5)) failures += r.holds ? 0 : 1;
  }
  return {rel <= kRel && failures == 0,
          fmt("Gaussian V(2k) max rel err %.2e (<= 5e-3); %.0f recursion failures in 100", rel,
              static_cast<double>(failures))};
}

// 13. Caffarelli exponents; the regularity probe is informational.
Outcome caffarelli() {
  constexpr double kTol = 1e-15;
  const auto rows = caffarelli_exponents(60);
  double dev = 0.0;
  for (const auto& r : rows) dev = std::max(dev, std::abs(r.partial_sum - r.closed_form));
  const double tail = std::abs(rows.back().partial_sum - 1.0 / 3.0);
  const Grid g = Grid::line(-10, 10, 4001);
  struct Case {
    std::function<double(double)> v;
    double lambda;
  };
  const std::vector<Case> cases = {
      {[](double x) { return 0.5 * x * x; }, 1.0},
      {[](double x) { return 0.5 * x * x + 0.2 * std::cos(2 * x); }, 2.2},
      {[](double x) { return 0.4 * x * x + 0.3 * std::cos(x); }, 1.1},
      {[](double x) { return x * x + 0.5 * std::cos(x); }, 2.5},
      {[](double x) { return 0.5 * x * x + 0.5 * std::log(std::cosh(x)); }, 1.5},
  };
  std::string probes;
  for (const auto& c : cases) {
    try {
      const RegularityProbe p = regularity_probe(potential(g, c.v), c.lambda);
      probes += fmt(" %.3f/%s/%s", p.modulus, p.pass_third ? "pass" : "fail",
                    p.pass_one ? "pass" : "fail");
    } catch (const Error&) {
      probes += " error";
    }
  }
  return {dev <= kTol && tail <= kTol,
          fmt("max |S_k - closed| %.1e, |S_60 - 1/3| %.1e (<= 1e-15); probes (modulus/Lambda^-1/3/Lambda^-1):", dev,
              tail) +
              probes};
}

// Centered density on [−1, 1]: a two-bump mixture shifted until its discrete
// barycenter vanishes.
Density centered_mixture(Rng& rng, const Grid& g) {
  for (;;) {
    const double m1 = rng.uniform(-0.6, 0.6), m2 = rng.uniform(-0.6, 0.6);
    const double s1 = rng.uniform(0.1, 0.4), s2 = rng.uniform(0.1, 0.4), w = rng.uniform(0.3, 0.7);
    auto make = [&](double c) {
      return density(g, [=](double x) {
        const double z1 = (x - m1 - c) / s1, z2 = (x - m2 - c) / s2;
        return w * std::exp(-0.5 * z1 * z1) / s1 + (1 - w) * std::exp(-0.5 * z2 * z2) / s2;
      });
    };
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (barycenter(Measure(make(mid)))[0] > 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    Density d = make(0.5 * (lo + hi));
    if (theta(Measure(d)) >= 0.2) return d;
  }
}

// 14. dist(ρ_μ, ρ_ν)/W₁(μ, ν)^{1/2} is bounded across compactly supported pairs.
Outcome compact_stability() {
  constexpr double kSpread = 20.0;
  const Grid mg = Grid::line(-1, 1, 401);
  const Grid sg = Grid::line(-25, 25, 4001);
  Rng rng(114);
  double lo = kInf, hi = 0.0, sum = 0.0;
  bool converged = true;
  for (int i = 0; i < 10; ++i) {
    const Density a = centered_mixture(rng, mg), b = centered_mixture(rng, mg);
    const SolveReport ra = solve_moment_measure(a, 0.0, sg);
    const SolveReport rb = solve_moment_measure(b, 0.0, sg);
    converged = converged && ra.converged && rb.converged;
    const double ratio = l1_dist_mod_translation(ra.rho, rb.rho).distance /
                         std::sqrt(wasserstein_1d(a, b, 1.0));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    sum += ratio;
  }
  return {converged && hi / lo <= kSpread,
          fmt("ratios in [%.3f, %.3f], max/min %.2f (<= 20)", lo, hi, hi / lo) +
              fmt("; mean constant %.3f", sum / 10.0)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"Brascamp-Lieb nonnegativity", bl_nonnegativity},
      {"equality manifold", bl_equality_manifold},
      {"stability exponent", bl_stability_exponent},
      {"Prekopa-Leindler deficit expansion", pl_expansion},
      {"variation formulas", variation_formulas},
      {"backbone identity", backbone_identity},
      {"strong duality", strong_duality},
      {"solver fixtures", solver_fixtures},
      {"regularization rate", regularization_rate},
      {"Wasserstein moment bound", wasserstein_lemma},
      {"M2 geodesic convexity", geodesic_convexity},
      {"p-moment recursion", moment_recursion},
      {"Caffarelli exponents", caffarelli},
      {"compact stability", compact_stability},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
