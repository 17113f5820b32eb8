#include "momlab/momsolve.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "momlab/errors.hpp"
#include "momlab/functionals.hpp"
#include "momlab/optimize.hpp"
#include "momlab/transport.hpp"

namespace momlab {
namespace {

Field antiderivative(const Grid& g, const std::vector<double>& slopes) {
  const double h = g.axis(0).spacing();
  std::vector<double> v(g.size());
  v[0] = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) v[i + 1] = v[i] + h * slopes[i];
  return Field(g, std::move(v));
}

// Slopes s(c + b) by linear interpolation over cell midpoints.
std::vector<double> shift_slopes(const Grid& g, const std::vector<double>& s, double b) {
  const Axis& ax = g.axis(0);
  const double h = ax.spacing();
  const std::size_t m = s.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = static_cast<double>(i) + b / h;
    if (u <= 0.0) {
      out[i] = s.front();
    } else if (u >= static_cast<double>(m - 1)) {
      out[i] = s.back();
    } else {
      const auto j = static_cast<std::size_t>(std::floor(u));
      const double t = u - static_cast<double>(j);
      out[i] = (1.0 - t) * s[j] + t * s[std::min(j + 1, m - 1)];
    }
  }
  return out;
}

struct CellState {
  std::vector<double> mass;
  std::vector<double> target;
  double residual = 0.0;
};

CellState evaluate(const Grid& g, const std::vector<double>& slopes, const Density& rho,
                   const QuantileFunction& q, bool centered) {
  const std::size_t m = slopes.size();
  const double h = g.axis(0).spacing();
  CellState st;
  st.mass.resize(m);
  st.target.resize(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    st.mass[i] = 0.5 * h * (rho[i] + rho[i + 1]);
    total += st.mass[i];
  }
  // Mid-mass levels from the left for the lower half and from the right for
  // the upper half.
  std::vector<double> right(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) right[i] = right[i + 1] + st.mass[i];
  double left = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lmid = (left + 0.5 * st.mass[i]) / total;
    const double rmid = (right[i + 1] + 0.5 * st.mass[i]) / total;
    if (lmid <= 0.5) {
      st.target[i] = q(std::max(lmid, DBL_MIN));
    } else {
      st.target[i] = q.from_right(std::max(rmid, DBL_MIN));
    }
    left += st.mass[i];
  }
  if (centered) {
    // Without regularization only centered targets have a fixed point. The
    // discrete mean of ψ' under e^{−ψ} vanishes only up to O(h²), so the
    // targets are shifted onto the mean of the current slopes; this also
    // removes the small offset allowed by the precondition.
    double shift = 0.0;
    for (std::size_t i = 0; i < m; ++i) shift += st.mass[i] * (slopes[i] - st.target[i]);
    shift /= total;
    for (double& t : st.target) t += shift;
  }
  for (std::size_t i = 0; i < m; ++i) st.residual += st.mass[i] * std::abs(slopes[i] - st.target[i]);
  st.residual /= total;
  return st;
}

Potential gauged(const Potential& psi, double alpha) {
  return psi.plus(gibbs(psi, alpha).log_normalizer());
}

}  // namespace

SolveReport solve_moment_measure(const Measure& mu, double alpha, const Grid& grid,
                                 const SolverOptions& opts) {
  if (grid.dim() != 1 || dim_of(mu) != 1) {
    throw UnsupportedDimensionError("the moment-measure solver is 1D only");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("α must be >= 0");
  if (!(opts.damping > 0.0) ||
      (opts.backend == SolverBackend::fixed_point && opts.damping > 1.0)) {
    throw ParameterError("damping must lie in (0, 1]; the ascent step must be positive");
  }
  if (!(opts.tol > 0.0)) throw ParameterError("tolerance must be positive");
  const double h = grid.axis(0).spacing();
  if (alpha == 0.0) {
    if (theta(mu) <= 1e-12) {
      throw DegenerateTargetError("target has Θ(μ) = 0: no moment-measure representation exists without regularization");
    }
    const double b = barycenter(mu)[0];
    if (std::abs(b) > 2.0 * h) {
      throw PreconditionError("target barycenter " + std::to_string(b) + " is not at the origin");
    }
  }

  const QuantileFunction q(mu);
  const std::size_t cells = grid.size() - 1;
  std::vector<double> s(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    s[i] = 0.5 * (grid.axis(0).node(i) + grid.axis(0).node(i + 1));
  }

  std::vector<double> trace;
  double prev = kInf;
  std::size_t increases = 0;
  std::size_t it = 0;
  bool residual_ok = false;
  double last_j = -kInf;
  std::size_t j_violations = 0;
  for (; it < opts.max_iter; ++it) {
    const Potential psi = convexify(antiderivative(grid, s));
    const Density rho = gibbs(psi, alpha);
    const CellState st = evaluate(grid, s, rho, q, alpha == 0.0);
    trace.push_back(st.residual);

    if (alpha == 0.0 || it % 10 == 0) {
      // J-ascent monitor; checked every step for α = 0 and sparsely otherwise.
      const double j = j_functional_dual(psi.plus(rho.log_normalizer()), mu, alpha);
      if (j < last_j - 10.0 * opts.tol) ++j_violations;
      last_j = j;
    }

    if (st.residual <= opts.tol) {
      if (alpha == 0.0) {
        const double b = barycenter(Measure(rho))[0];
        if (std::abs(b) > h) {
          s = shift_slopes(grid, s, b);
          prev = kInf;
          increases = 0;
          continue;
        }
      }
      residual_ok = true;
      break;
    }
    if (st.residual > prev) {
      if (++increases >= opts.divergence_window) {
        throw NonConvergenceError("residual grew for " + std::to_string(increases) +
                                  " consecutive iterations (last " +
                                  std::to_string(st.residual) + " at iteration " +
                                  std::to_string(it) + ")");
      }
    } else {
      increases = 0;
    }
    prev = st.residual;
    if (opts.backend == SolverBackend::fixed_point) {
      for (std::size_t i = 0; i < cells; ++i) {
        s[i] = (1.0 - opts.damping) * s[i] + opts.damping * st.target[i];
      }
    } else {
      // ρ mass to the right of each cell, from the right for tail precision.
      double total = 0.0;
      for (double m : st.mass) total += m;
      double right = 0.0;
      for (std::size_t i = cells; i-- > 0;) {
        const double r = right + 0.5 * st.mass[i];
        right += st.mass[i];
        s[i] += opts.damping * (q.survival(s[i]) - r / total);
      }
      std::sort(s.begin(), s.end());
    }
  }

  const Potential psi = gauged(convexify(antiderivative(grid, s)), alpha);
  const Density rho = gibbs(psi, alpha);
  const CellState st = evaluate(grid, s, rho, q, alpha == 0.0);

  SolveReport rep{psi, rho, alpha, it, st.residual, 0.0, 0.0, 0.0, 0.0, 0.0,
                  false, false, false, 0.0, 0.0, 0, {}};
  rep.residual_ok = residual_ok && st.residual <= opts.tol;
  rep.w1_deposited = wasserstein_1d(moment_measure(psi, alpha), mu, 1.0);
  rep.j_value = j_functional_dual(psi, mu, alpha);
  rep.e_value = e_functional(rho, mu, alpha);
  rep.gap = rep.j_value + rep.e_value;
  rep.gap_tolerance = std::max(10.0 * opts.tol, grid_tolerance(grid));
  rep.gap_ok = std::abs(rep.gap) <= rep.gap_tolerance;
  rep.converged = rep.residual_ok && rep.gap_ok;
  rep.m2_rho = moments(Measure(rho), 2.0);
  rep.barycenter = barycenter(Measure(rho))[0];
  rep.j_ascent_violations = j_violations;
  rep.residual_trace = std::move(trace);
  return rep;
}

RateFit regularization_path(const Measure& mu, std::vector<double> alphas, const Grid& grid,
                            const SolverOptions& opts, double alpha_floor) {
  if (alphas.empty()) throw ParameterError("empty α list");
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= alpha_floor)) {
      throw ParameterError("α = " + std::to_string(alphas[i]) + " is below the floor " +
                           std::to_string(alpha_floor));
    }
    if (i > 0 && alphas[i] == alphas[i - 1]) throw ParameterError("α values must be distinct");
  }
  const SolveReport base = solve_moment_measure(mu, 0.0, grid, opts);
  RateFit fit;
  std::vector<double> lx, ly;
  for (double a : alphas) {
    const SolveReport r = solve_moment_measure(mu, a, grid, opts);
    const TranslationFit d = l1_dist_mod_translation(r.rho, base.rho);
    fit.samples.push_back({a, d.distance, d.x0, d.at_bound});
    if (d.distance > 0.0) {
      lx.push_back(std::log(a));
      ly.push_back(std::log(d.distance));
    }
  }
  const LineFit lf = fit_line(lx, ly);
  fit.slope_defined = lf.defined;
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  const RateSample& top = fit.samples.front();
  fit.c_hat = top.distance / std::sqrt(top.alpha);
  fit.bound_holds = std::all_of(fit.samples.begin(), fit.samples.end(), [&](const RateSample& s) {
    return s.distance <= 4.0 * fit.c_hat * std::sqrt(s.alpha);
  });
  return fit;
}

std::vector<CaffarelliRow> caffarelli_exponents(std::size_t k) {
  if (k == 0) throw ParameterError("k must be at least 1");
  std::vector<CaffarelliRow> rows;
  double sum = 0.0;
  double term = 0.5;
  for (std::size_t i = 1; i <= k; ++i) {
    sum += (i % 2 == 1) ? term : -term;
    const double closed = (1.0 - std::pow(-0.5, static_cast<double>(i))) / 3.0;
    rows.push_back({i, sum, closed, std::ldexp(1.0, -static_cast<int>(i))});
    term *= 0.5;
  }
  return rows;
}

RegularityProbe regularity_probe(const Potential& v, double lambda, const SolverOptions& opts,
                                 double margin) {
  const Grid& g = v.grid();
  if (g.dim() != 1) throw UnsupportedDimensionError("regularity probe is 1D only");
  if (!(lambda > 0.0)) throw ParameterError("Λ must be positive");
  const Hessian hs = second_derivative(v);
  const Axis& ax = g.axis(0);
  RegularityProbe out;
  out.tolerance = grid_tolerance(g);
  double curv = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = ax.node(k);
    if (x < ax.lo + margin * ax.width() || x > ax.hi - margin * ax.width()) continue;
    if (std::isfinite(v[k])) curv = std::max(curv, hs.entries[0][k]);
  }
  out.max_curvature = curv;
  if (curv > lambda + out.tolerance) {
    throw ClassMembershipError("V'' reaches " + std::to_string(curv) + " > Λ = " +
                               std::to_string(lambda));
  }
  const Measure mu = center(gibbs(v, 0.0));
  const SolveReport r = solve_moment_measure(mu, 0.0, g, opts);
  // In the far tails of ρ the target quantiles of μ run into the edge of the
  // box and the slopes saturate, so the modulus is read over the bulk of ρ.
  constexpr double kTailMass = 1e-9;
  const Hessian hpsi = second_derivative(r.psi);
  std::vector<double> cdf(g.size(), 0.0);
  for (std::size_t k = 1; k < g.size(); ++k) {
    cdf[k] = cdf[k - 1] + 0.5 * ax.spacing() * (r.rho[k - 1] + r.rho[k]);
  }
  double modulus = kInf;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = ax.node(k);
    if (x < ax.lo + margin * ax.width() || x > ax.hi - margin * ax.width()) continue;
    if (cdf[k] < kTailMass || cdf.back() - cdf[k] < kTailMass) continue;
    modulus = std::min(modulus, hpsi.entries[0][k]);
  }
  if (!std::isfinite(modulus)) throw DomainError("strong-convexity window is empty");
  out.modulus = modulus;
  out.lambda_third = std::cbrt(1.0 / lambda);
  out.lambda_one = 1.0 / lambda;
  out.pass_third = out.modulus >= out.lambda_third - out.tolerance;
  out.pass_one = out.modulus >= out.lambda_one - out.tolerance;
  out.iterations = r.iterations;
  out.residual = r.residual;
  out.converged = r.converged;
  return out;
}

std::vector<MomentRow> p_moment_bound_check(const Potential& psi, double lambda, std::size_t k_max,
                                            double margin, double rel_tol) {
  const Grid& g = psi.grid();
  if (g.dim() != 1) throw UnsupportedDimensionError("moment recursion check is 1D only");
  if (!(lambda > 0.0)) throw ParameterError("λ must be positive");
  const double modulus = strong_convexity_modulus(psi, margin);
  if (modulus < lambda * (1.0 - rel_tol) - grid_tolerance(g)) {
    throw PreconditionError("strong-convexity modulus " + std::to_string(modulus) +
                            " is below λ = " + std::to_string(lambda));
  }
  std::vector<MomentRow> rows;
  if (k_max == 0) return rows;

  const Density rho = gibbs(psi, 0.0);  // e^{−ψ} with ψ normalized additively
  const Axis& ax = g.axis(0);
  std::size_t imin = 0;
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (psi[k] < psi[imin]) imin = k;
  }
  double xstar = ax.node(imin);
  if (imin > 0 && imin + 1 < ax.n && std::isfinite(psi[imin - 1]) && std::isfinite(psi[imin + 1])) {
    const double a = psi[imin - 1], b = psi[imin], c = psi[imin + 1];
    const double den = a - 2.0 * b + c;
    if (den > 0.0) xstar += 0.5 * ax.spacing() * (a - c) / den;
  }
  std::vector<double> tmp(g.size());
  auto vmoment = [&](std::size_t k2) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      tmp[k] = rho[k] == 0.0 ? 0.0 : std::pow(std::abs(ax.node(k) - xstar), static_cast<double>(k2)) * rho[k];
    }
    return integrate(g, tmp);
  };
  constexpr double d = 1.0;
  double prev = vmoment(0);
  double closed = 1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double v2k = vmoment(2 * k);
    const double ratio = (d + 2.0 * static_cast<double>(k) - 2.0) / lambda;
    const double bound = ratio * prev;
    closed *= (d + 2.0 * static_cast<double>(k - 1)) / lambda;
    rows.push_back({k, v2k, ratio, bound, closed, v2k <= bound * (1.0 + rel_tol) + 1e-12});
    prev = v2k;
  }
  return rows;
}

}  // namespace momlab
