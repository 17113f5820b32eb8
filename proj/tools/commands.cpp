#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <system_error>

#include "cli_errors.hpp"
#include "config.hpp"
#include "inputs.hpp"
#include "momlab/errors.hpp"
#include "momlab/field_io.hpp"
#include "momlab/functionals.hpp"
#include "momlab/measure_io.hpp"
#include "momlab/momsolve.hpp"
#include "momlab/optimize.hpp"
#include "momlab/reports.hpp"
#include "momlab/transport.hpp"
#include "svg.hpp"

namespace momlab::cli {
namespace {

// Writes named files into the output directory, each through a rename.
class Outputs {
 public:
  explicit Outputs(const std::string& flag) : dir_(output_dir(flag)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ProbeFailure("cannot create " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& contents) const {
    const auto path = dir_ / name;
    try {
      write_file_atomic(path, contents);
    } catch (const std::exception& e) {
      throw ProbeFailure("cannot write " + path.string() + ": " + e.what());
    }
    std::cout << "wrote " << path.string() << '\n';
  }

  void table(const std::string& name, const CsvTable& t) const { write(name, t.str()); }

  void field(const std::string& name, const Field& f, bool convex = false) const {
    std::ostringstream o;
    write_field(o, f, convex);
    write(name, o.str());
  }

 private:
  std::filesystem::path dir_;
};

void summary(const std::string& key, double v) {
  std::cout << key << " = " << format_number(v) << '\n';
}

void summary(const std::string& key, const std::string& v) { std::cout << key << " = " << v << '\n'; }

struct Common {
  std::string out;
  std::string config;

  void add(CLI::App* app) {
    app->add_option("--out", out, "Output directory (default: $MOMLAB_OUT, else the working directory)");
    app->add_option("--config", config, "Flat `key = value` file; flags given on the command line win");
  }
};

struct GridFlag {
  std::string text;

  void add(CLI::App* app, bool required) {
    auto* o = app->add_option("--grid", text, "Grid as lo,hi,n (or lo,hi,n,lo,hi,n in 2D)");
    if (required) o->required();
  }
  std::optional<Grid> get() const {
    if (text.empty()) return std::nullopt;
    return parse_grid(text);
  }
  Grid require(const std::string& why) const {
    if (text.empty()) throw UsageError("--grid is required " + why);
    return parse_grid(text);
  }
};

struct SolverFlags {
  double damping = 0.5;
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  std::size_t window = 50;
  std::string backend = "fixed-point";

  void add(CLI::App* app) {
    app->add_option("--damping", damping, "Fixed-point weight in (0,1], or gradient step")
        ->capture_default_str();
    app->add_option("--tol", tol, "Residual tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
    app->add_option("--divergence-window", window, "Consecutive residual increases treated as divergence")
        ->capture_default_str();
    app->add_option("--backend", backend, "fixed-point or gradient-ascent")
        ->check(CLI::IsMember({"fixed-point", "gradient-ascent"}))
        ->capture_default_str();
  }
  SolverOptions get() const {
    SolverOptions o;
    o.backend = backend == "gradient-ascent" ? SolverBackend::gradient_ascent : SolverBackend::fixed_point;
    o.damping = damping;
    o.tol = tol;
    o.max_iter = max_iter;
    o.divergence_window = window;
    return o;
  }
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

// --- solve -----------------------------------------------------------------

Command add_solve(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    SolverFlags solver;
    std::string mu;
    double alpha = 0.0;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("solve", "Solve for the moment-measure potential ψ of a 1D measure");
  app->add_option("--mu", o->mu, "Measure file (density or atoms)")->required();
  app->add_option("--alpha", o->alpha, "Quadratic regularization α >= 0")->capture_default_str();
  o->grid.add(app, true);
  o->solver.add(app);
  o->common.add(app);
  return {app, [o] {
            const Measure mu = load_measure(o->mu, "--mu");
            const SolverOptions opts = o->solver.get();
            const SolveReport r = solve_moment_measure(mu, o->alpha, o->grid.get().value(), opts);
            const Outputs out(o->common.out);
            out.table("solve.csv", solve_table(r, opts.tol));
            CsvTable trace = residual_trace_table(r);
            trace.add_column("tol", opts.tol);
            out.table("residual_trace.csv", trace);
            out.field("psi.csv", r.psi.field(), true);
            out.field("rho.csv", r.rho.field());
            summary("iterations", static_cast<double>(r.iterations));
            summary("residual", r.residual);
            summary("gap", r.gap);
            summary("converged", bool_str(r.converged));
            if (!r.converged) {
              std::cerr << "solve: not converged (residual " << format_number(r.residual) << ", gap "
                        << format_number(r.gap) << ")\n";
              return static_cast<int>(kExitNonConvergence);
            }
            return static_cast<int>(kExitOk);
          }};
}

// --- bl-deficit / bl-stability ----------------------------------------------

Command add_bl_deficit(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    std::string phi, f;
    double alpha = 0.0;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("bl-deficit", "Brascamp-Lieb deficit of f under e^{-φ}");
  app->add_option("--phi", o->phi, "Convex potential: field file or expression in x (and y)")->required();
  app->add_option("--f", o->f, "Test function: field file or expression")->required();
  app->add_option("--alpha", o->alpha, "Quadratic weight added to φ")->capture_default_str();
  o->grid.add(app, false);
  o->common.add(app);
  return {app, [o] {
            const Potential phi = load_potential(o->phi, o->grid.get(), "--phi");
            const Field f = load_field(o->f, phi.grid(), "--f");
            const DeficitReport r = bl_deficit(f, phi, o->alpha);
            const Outputs out(o->common.out);
            out.table("bl_deficit.csv", deficit_table(r));
            summary("deficit", r.deficit);
            summary("dirichlet_term", r.dirichlet_term);
            summary("variance_term", r.variance_term);
            if (phi.grid().dim() == 1 && o->alpha == 0.0) {
              const ManifoldDistance d = dist_to_bl_optimizers(f, phi);
              CsvTable t({"distance_l1", "a", "b", "tolerance"});
              t.add_row({d.distance, d.a, d.b, r.tolerance});
              out.table("bl_distance.csv", t);
              summary("distance", d.distance);
            }
            return static_cast<int>(kExitOk);
          }};
}

Command add_bl_stability(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    std::string phi, g, eps = "1e-3:1e-1:9";
    bool svg = false;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("bl-stability",
                                  "Sweep f = φ' + εg and fit log distance against log deficit");
  app->add_option("--phi", o->phi, "Convex potential: field file or expression in x")->required();
  app->add_option("--g", o->g, "Perturbation: field file or expression in x")->required();
  app->add_option("--eps", o->eps, "Log-spaced sweep lo:hi:n")->capture_default_str();
  app->add_flag("--svg", o->svg, "Also write a log-log chart");
  o->grid.add(app, false);
  o->common.add(app);
  return {app, [o] {
            const Potential phi = load_potential(o->phi, o->grid.get(), "--phi");
            if (phi.grid().dim() != 1) throw UsageError("bl-stability is 1D only");
            const Field g = load_field(o->g, phi.grid(), "--g");
            const Field dphi = gradient(phi).components[0];
            CsvTable rows({"epsilon", "deficit", "distance_l1", "distance_over_sqrt_deficit", "tolerance"});
            std::vector<double> lx, ly, eps_used, defs, dists;
            double c_hat = 0.0;
            for (double eps : parse_log_range(o->eps)) {
              const Field f = linear_combination(1.0, dphi, eps, g);
              const DeficitReport d = bl_deficit(f, phi);
              const double dist = dist_to_bl_optimizers(f, phi).distance;
              const double ratio = d.deficit > 0.0 ? dist / std::sqrt(d.deficit) : kInf;
              rows.add_row({eps, d.deficit, dist, ratio, d.tolerance});
              eps_used.push_back(eps);
              defs.push_back(d.deficit);
              dists.push_back(dist);
              if (d.deficit > 0.0 && dist > 0.0 && std::isfinite(d.deficit)) {
                lx.push_back(std::log(d.deficit));
                ly.push_back(std::log(dist));
                c_hat = std::max(c_hat, ratio);
              }
            }
            if (lx.size() < 2) throw UsageError("fewer than two sweep points with positive deficit");
            const LineFit fit = fit_line(lx, ly);
            const Outputs out(o->common.out);
            out.table("bl_stability.csv", rows);
            CsvTable s({"slope", "intercept", "r2", "points", "c_hat_max_distance_over_sqrt_deficit", "tolerance"});
            s.add_row({fit.slope, fit.intercept, fit.r2, static_cast<long long>(lx.size()), c_hat,
                       grid_tolerance(phi.grid())});
            out.table("bl_stability_summary.csv", s);
            if (o->svg) {
              Chart c{"Brascamp-Lieb stability", "deficit", "distance", true, true,
                      {{"distance vs deficit", defs, dists}}};
              out.write("bl_stability.svg", render_svg(c));
            }
            summary("slope", fit.slope);
            summary("c_hat", c_hat);
            return static_cast<int>(kExitOk);
          }};
}

// --- pl-deficit --------------------------------------------------------------

Command add_pl(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    std::string f, g, h;
    double s = 0.5;
    bool no_check = false;
    std::string phi, bl_f, delta = "1e-3:1e-2:4";
    double window = 10.0;
    bool exhaustive = false;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "pl-deficit",
      "Prekopa-Leindler deficit of a triple (--f --g --h), or of the sup-convolution triple "
      "built from --phi and --bl-f over a δ sweep");
  // -h would clash with --h.
  app->set_help_flag("--help", "Print this help message and exit");
  app->add_option("--f", o->f, "First function (file or expression)");
  app->add_option("--g", o->g, "Second function");
  app->add_option("--h", o->h, "Third function");
  app->add_option("--s", o->s, "Interpolation weight in (0,1)")->capture_default_str();
  app->add_flag("--no-check", o->no_check, "Skip the Prekopa condition scan");
  app->add_option("--phi", o->phi, "Convex potential for the sup-convolution triple");
  app->add_option("--bl-f", o->bl_f, "Function whose Brascamp-Lieb deficit the triple probes");
  app->add_option("--delta", o->delta, "Log-spaced δ sweep lo:hi:n")->capture_default_str();
  app->add_option("--window", o->window, "Sup-convolution search window factor")->capture_default_str();
  app->add_flag("--exhaustive", o->exhaustive, "Search every grid offset in the sup-convolution");
  o->grid.add(app, false);
  o->common.add(app);
  return {app, [o] {
            const Outputs out(o->common.out);
            const bool triple = !o->f.empty() || !o->g.empty() || !o->h.empty();
            const bool expansion = !o->phi.empty() || !o->bl_f.empty();
            if (triple == expansion) {
              throw UsageError("pass either --f --g --h or --phi --bl-f");
            }
            if (triple) {
              if (o->f.empty() || o->g.empty() || o->h.empty()) {
                throw UsageError("--f, --g and --h are all required");
              }
              if (!(o->s > 0.0 && o->s < 1.0)) throw UsageError("--s must lie in (0,1)");
              const auto grid = o->grid.get();
              const Field f = load_field(o->f, grid, "--f");
              const Field g = load_field(o->g, grid ? grid : std::optional<Grid>(f.grid()), "--g");
              const Field h = load_field(o->h, grid ? grid : std::optional<Grid>(f.grid()), "--h");
              const double eps = pl_deficit(f, g, h, o->s, !o->no_check);
              CsvTable t({"s", "integral_f", "integral_g", "integral_h", "deficit", "condition_checked", "tolerance"});
              t.add_row({o->s, integrate(f), integrate(g), integrate(h), eps, !o->no_check,
                         grid_tolerance(f.grid())});
              out.table("pl_deficit.csv", t);
              summary("deficit", eps);
              return static_cast<int>(kExitOk);
            }
            if (o->phi.empty() || o->bl_f.empty()) throw UsageError("--phi and --bl-f are both required");
            const Potential phi = load_potential(o->phi, o->grid.get(), "--phi");
            const Field f = load_field(o->bl_f, phi.grid(), "--bl-f");
            const double half_bl = 0.5 * bl_deficit(f, phi).deficit;
            const SupConvolutionOptions sopts{!o->exhaustive, o->window};
            CsvTable t({"delta", "deficit", "deficit_over_delta_sq", "half_bl_deficit", "ratio"});
            double lo = kInf, hi = 0.0;
            for (double delta : parse_log_range(o->delta)) {
              const BlTriple tr = bl_triple(f, phi, delta, sopts);
              const double eps = pl_deficit(tr.u, tr.v, tr.w, 0.5, false);
              const double ratio = eps / (delta * delta) / half_bl;
              t.add_row({delta, eps, eps / (delta * delta), half_bl, ratio});
              lo = std::min(lo, ratio);
              hi = std::max(hi, ratio);
            }
            t.add_column("tolerance", grid_tolerance(phi.grid()));
            out.table("pl_expansion.csv", t);
            summary("half_bl_deficit", half_bl);
            summary("ratio_min", lo);
            summary("ratio_max", hi);
            return static_cast<int>(kExitOk);
          }};
}

// --- duality -----------------------------------------------------------------

Command add_duality(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    SolverFlags solver;
    std::string mu, phi, rho, dual;
    double alpha = 0.0;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "duality", "J + E at the solved optimum of --mu, or at a given pair --phi --rho");
  app->add_option("--mu", o->mu, "Measure file")->required();
  app->add_option("--alpha", o->alpha, "Quadratic regularization α >= 0")->capture_default_str();
  app->add_option("--phi", o->phi, "Potential φ (file or expression) to evaluate instead of solving");
  app->add_option("--rho", o->rho, "Density file ρ to evaluate instead of solving");
  app->add_option("--dual", o->dual, "Dual grid lo,hi,n for the conjugate of φ");
  o->grid.add(app, false);
  o->solver.add(app);
  o->common.add(app);
  return {app, [o] {
            const Measure mu = load_measure(o->mu, "--mu");
            const Outputs out(o->common.out);
            CsvTable t({"mode", "alpha", "J", "E", "gap", "gap_tolerance", "converged"});
            if (o->phi.empty() != o->rho.empty()) throw UsageError("--phi and --rho go together");
            int code = kExitOk;
            double gap = 0.0;
            if (!o->phi.empty()) {
              const Potential phi = load_potential(o->phi, o->grid.get(), "--phi");
              const Measure rm = load_measure(o->rho, "--rho");
              const auto* rho = std::get_if<Density>(&rm);
              if (rho == nullptr) throw UsageError("--rho must be a density");
              const std::optional<Grid> dual =
                  o->dual.empty() ? std::nullopt : std::optional<Grid>(parse_grid(o->dual));
              const double j = j_functional(phi, mu, o->alpha, dual);
              const double e = e_functional(*rho, mu, o->alpha);
              gap = j + e;
              t.add_row({std::string("given_pair"), o->alpha, j, e, gap, grid_tolerance(phi.grid()), false});
            } else {
              const SolveReport r = solve_moment_measure(mu, o->alpha, o->grid.require("to solve"),
                                                         o->solver.get());
              gap = r.gap;
              t.add_row({std::string("solved"), o->alpha, r.j_value, r.e_value, r.gap, r.gap_tolerance,
                         r.converged});
              if (!r.converged) code = kExitNonConvergence;
            }
            out.table("duality.csv", t);
            summary("gap", gap);
            return code;
          }};
}

// --- reg-path ----------------------------------------------------------------

Command add_reg_path(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    SolverFlags solver;
    std::string mu, alphas, alpha_range;
    double floor = kDefaultAlphaFloor;
    bool svg = false;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("reg-path",
                                  "Distance of regularized Gibbs measures to the α = 0 solution");
  app->add_option("--mu", o->mu, "Measure file")->required();
  app->add_option("--alphas", o->alphas, "Comma-separated α values");
  app->add_option("--alpha-range", o->alpha_range, "Log-spaced α values lo:hi:n");
  app->add_option("--alpha-floor", o->floor, "Smallest admissible α")->capture_default_str();
  app->add_flag("--svg", o->svg, "Also write a log-log chart");
  o->grid.add(app, true);
  o->solver.add(app);
  o->common.add(app);
  return {app, [o] {
            if (o->alphas.empty() == o->alpha_range.empty()) {
              throw UsageError("pass exactly one of --alphas and --alpha-range");
            }
            const std::vector<double> alphas =
                o->alphas.empty() ? parse_log_range(o->alpha_range) : parse_list(o->alphas);
            const Measure mu = load_measure(o->mu, "--mu");
            const RateFit f = regularization_path(mu, alphas, o->grid.get().value(), o->solver.get(), o->floor);
            const Outputs out(o->common.out);
            CsvTable samples = rate_samples_table(f), fit_row = rate_summary_table(f);
            samples.add_column("solver_tol", o->solver.tol);
            fit_row.add_column("solver_tol", o->solver.tol);
            out.table("reg_path.csv", samples);
            out.table("reg_path_summary.csv", fit_row);
            if (o->svg) {
              Series d{"l1 distance", {}, {}}, b{"4 c_hat sqrt(alpha)", {}, {}};
              for (const auto& s : f.samples) {
                d.x.push_back(s.alpha);
                d.y.push_back(s.distance);
                b.x.push_back(s.alpha);
                b.y.push_back(4.0 * f.c_hat * std::sqrt(s.alpha));
              }
              out.write("reg_path.svg", render_svg({"Regularization path", "alpha", "distance", true, true, {d, b}}));
            }
            summary("slope", f.slope);
            summary("c_hat", f.c_hat);
            summary("bound_holds", bool_str(f.bound_holds));
            return static_cast<int>(kExitOk);
          }};
}

// --- probe-regularity / caffarelli-exponents ----------------------------------

Command add_probe(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    SolverFlags solver;
    std::string v;
    double lambda = 0.0;
    double margin = 0.1;
    std::size_t k_max = 5;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "probe-regularity",
      "Strong convexity of ψ for μ ∝ e^{-V} with V'' <= Λ, and the moment recursion of e^{-ψ}");
  app->add_option("--v", o->v, "Potential V (file or expression in x)")->required();
  app->add_option("--lambda", o->lambda, "Curvature bound Λ")->required();
  app->add_option("--margin", o->margin, "Fraction of the box ignored at each end")->capture_default_str();
  app->add_option("--k-max", o->k_max, "Highest moment order 2k in the recursion check")->capture_default_str();
  o->grid.add(app, false);
  o->solver.add(app);
  o->common.add(app);
  return {app, [o] {
            const Potential v = load_potential(o->v, o->grid.get(), "--v");
            const SolverOptions opts = o->solver.get();
            RegularityProbe p;
            std::vector<MomentRow> moments;
            double lambda_psi = 0.0;
            try {
              p = regularity_probe(v, o->lambda, opts, o->margin);
              const SolveReport r = solve_moment_measure(center(gibbs(v, 0.0)), 0.0, v.grid(), opts);
              lambda_psi = strong_convexity_modulus(r.psi, o->margin);
              if (!(lambda_psi > 0.0)) throw ProbeFailure("ψ is not strongly convex on the window");
              moments = p_moment_bound_check(r.psi, lambda_psi, o->k_max, o->margin);
            } catch (const NonConvergenceError& e) {
              throw ProbeFailure(std::string("probe solve failed: ") + e.what());
            }
            if (!p.converged) throw ProbeFailure("probe solve did not converge");
            const Outputs out(o->common.out);
            out.table("probe.csv", probe_table(p, o->lambda));
            CsvTable mt = moment_table(moments, lambda_psi);
            mt.add_column("tolerance", grid_tolerance(v.grid()));
            out.table("moments.csv", mt);
            summary("modulus", p.modulus);
            summary("lambda_pow_minus_third", p.lambda_third);
            summary("pass_third", bool_str(p.pass_third));
            summary("pass_one", bool_str(p.pass_one));
            const bool all_hold =
                std::all_of(moments.begin(), moments.end(), [](const MomentRow& r) { return r.holds; });
            summary("moment_recursion_holds", bool_str(all_hold));
            return static_cast<int>(kExitOk);
          }};
}

Command add_caffarelli(CLI::App& root) {
  struct Opts {
    Common common;
    std::size_t k = 20;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("caffarelli-exponents",
                                  "Partial sums of the bootstrap exponents and their closed form");
  app->add_option("--k", o->k, "Number of bootstrap steps")->capture_default_str();
  o->common.add(app);
  return {app, [o] {
            const auto rows = caffarelli_exponents(o->k);
            const Outputs out(o->common.out);
            CsvTable t = caffarelli_table(rows);
            t.add_column("tolerance", 1e-15);
            out.table("caffarelli.csv", t);
            summary("partial_sum", rows.back().partial_sum);
            summary("limit", 1.0 / 3.0);
            return static_cast<int>(kExitOk);
          }};
}

// --- compact-stability ----------------------------------------------------------

// Two-bump mixture on `g`, shifted until its discrete barycenter vanishes,
// redrawn until Θ >= theta_min.
Density random_centered(std::mt19937_64& eng, const Grid& g, double theta_min) {
  const Axis& ax = g.axis(0);
  const double w = ax.width();
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double m1 = ax.lo + w * u(0.2, 0.8), m2 = ax.lo + w * u(0.2, 0.8);
    const double s1 = w * u(0.05, 0.2), s2 = w * u(0.05, 0.2), p = u(0.3, 0.7);
    auto make = [&](double c) {
      return Density::normalized(Field::sample(g, [=](double x) {
        const double z1 = (x - m1 - c) / s1, z2 = (x - m2 - c) / s2;
        return p * std::exp(-0.5 * z1 * z1) / s1 + (1 - p) * std::exp(-0.5 * z2 * z2) / s2;
      }));
    };
    double lo = -0.5 * w, hi = 0.5 * w;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (barycenter(Measure(make(mid)))[0] > 0.5 * (ax.lo + ax.hi)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    Density d = make(0.5 * (lo + hi));
    if (theta(Measure(d)) >= theta_min) return d;
  }
  throw ProbeFailure("could not draw a measure with the requested Θ");
}

Command add_compact(CLI::App& root) {
  struct Opts {
    Common common;
    GridFlag grid;
    SolverFlags solver;
    std::string mu, nu, box = "-1,1,401";
    std::size_t pairs = 0;
    std::uint64_t seed = 1;
    double theta_min = 0.2;
    std::size_t dual_n = 401;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "compact-stability",
      "dist(ρ_μ, ρ_ν) and the potential distance against W1(μ, ν)^{1/2} for centered measures");
  app->add_option("--mu", o->mu, "First measure file");
  app->add_option("--nu", o->nu, "Second measure file");
  app->add_option("--random-pairs", o->pairs, "Draw this many random centered pairs instead");
  app->add_option("--seed", o->seed, "Seed for --random-pairs")->capture_default_str();
  app->add_option("--box", o->box, "Grid lo,hi,n of the random measures")->capture_default_str();
  app->add_option("--theta-min", o->theta_min, "Lower bound on Θ for random measures")->capture_default_str();
  app->add_option("--dual-n", o->dual_n, "Nodes of the grid carrying the conjugate potentials")
      ->capture_default_str();
  o->grid.add(app, true);
  o->solver.add(app);
  o->common.add(app);
  return {app, [o] {
            std::vector<std::pair<Measure, Measure>> pairs;
            if (o->pairs > 0) {
              if (!o->mu.empty() || !o->nu.empty()) throw UsageError("--random-pairs excludes --mu/--nu");
              std::mt19937_64 eng(o->seed);
              const Grid box = parse_grid(o->box);
              if (box.dim() != 1) throw UsageError("--box must be 1D");
              for (std::size_t i = 0; i < o->pairs; ++i) {
                Density a = random_centered(eng, box, o->theta_min);
                Density b = random_centered(eng, box, o->theta_min);
                pairs.emplace_back(Measure(std::move(a)), Measure(std::move(b)));
              }
            } else {
              if (o->mu.empty() || o->nu.empty()) throw UsageError("pass --mu and --nu, or --random-pairs");
              pairs.emplace_back(load_measure(o->mu, "--mu"), load_measure(o->nu, "--nu"));
            }
            const Grid grid = o->grid.get().value();
            const SolverOptions opts = o->solver.get();
            CsvTable rows({"pair", "theta_mu", "theta_nu", "l1_dist_mod_translation", "potential_dist_mod_affine",
                           "affine_lambda", "w1", "ratio_gibbs", "ratio_potential", "converged"});
            double lo = kInf, hi = 0.0;
            bool all_converged = true;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              const auto& [mu, nu] = pairs[i];
              const SolveReport a = solve_moment_measure(mu, 0.0, grid, opts);
              const SolveReport b = solve_moment_measure(nu, 0.0, grid, opts);
              all_converged = all_converged && a.converged && b.converged;
              const double dist = l1_dist_mod_translation(a.rho, b.rho).distance;
              // φ = ψ* on a grid covering both supports.
              double s_lo = kInf, s_hi = -kInf;
              for (const Measure* m : {&mu, &nu}) {
                const QuantileFunction qf(*m);
                s_lo = std::min(s_lo, qf(1e-12));
                s_hi = std::max(s_hi, qf(1.0 - 1e-12));
              }
              const double pad = 0.05 * (s_hi - s_lo);
              const Grid dual = Grid::line(s_lo - pad, s_hi + pad, o->dual_n);
              const Potential pa = legendre_transform(a.psi, dual).potential;
              const Potential pb = legendre_transform(b.psi, dual).potential;
              const AffineDistance ad = dist_mod_affine(pa, pb, 16, grid);
              const double w1 = wasserstein_1d(mu, nu, 1.0);
              const double ratio = w1 > 0.0 ? dist / std::sqrt(w1) : kInf;
              const double ratio_pot = w1 > 0.0 ? ad.distance / std::sqrt(w1) : kInf;
              rows.add_row({static_cast<long long>(i), theta(mu), theta(nu), dist, ad.distance, ad.lambda, w1,
                            ratio, ratio_pot, a.converged && b.converged});
              if (std::isfinite(ratio)) {
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
              }
            }
            const Outputs out(o->common.out);
            rows.add_column("solver_tol", opts.tol);
            out.table("compact_stability.csv", rows);
            CsvTable s({"pairs", "ratio_min", "ratio_max", "ratio_spread", "c_hat", "solver_tol"});
            s.add_row({static_cast<long long>(pairs.size()), lo, hi, hi / lo, hi, opts.tol});
            out.table("compact_stability_summary.csv", s);
            summary("c_hat", hi);
            summary("ratio_spread", hi / lo);
            return static_cast<int>(all_converged ? kExitOk : kExitNonConvergence);
          }};
}

// Expands `--config FILE` of the selected subcommand into flag tokens placed
// before the command-line flags, so the latter take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& root) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  for (const CLI::App* s : root.get_subcommands({})) {
    if (s->get_name() == args[1]) sub = s;
  }
  if (sub == nullptr) return args;
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> out{args[0], args[1]};
  for (auto& t : config_tokens(path, *sub)) out.push_back(std::move(t));
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  return {add_solve(app),  add_bl_deficit(app), add_bl_stability(app), add_pl(app),
          add_duality(app), add_reg_path(app),  add_probe(app),        add_caffarelli(app),
          add_compact(app)};
}

int run(int argc, char** argv) {
  CLI::App app("Numerical experiments on moment measures and their stability", "momlab");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  const std::vector<Command> commands = register_commands(app);
  auto fail = [](int code, const std::string& msg) {
    std::cerr << "error: " << msg << '\n';
    return code;
  };
  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args, app);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitInput;
    }
    for (const Command& c : commands) {
      if (c.app->parsed()) return c.run();
    }
    return kExitInput;
  } catch (const UsageError& e) {
    return fail(kExitInput, e.what());
  } catch (const ParseError& e) {
    return fail(kExitInput, e.message() + " (line " + std::to_string(e.line()) + ")");
  } catch (const NonConvergenceError& e) {
    return fail(kExitNonConvergence, e.what());
  } catch (const ProbeFailure& e) {
    return fail(kExitProbe, e.what());
  } catch (const Error& e) {
    return fail(kExitInput, e.what());
  } catch (const std::exception& e) {
    return fail(kExitProbe, e.what());
  }
}

}  // namespace momlab::cli
