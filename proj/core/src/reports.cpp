#include "momlab/reports.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "momlab/errors.hpp"
#include "momlab/field_io.hpp"

namespace momlab {

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw ParameterError("CSV table needs at least one column");
}

void CsvTable::add_row(std::vector<CsvCell> cells) {
  if (cells.size() != columns_.size()) {
    throw InvariantError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

void CsvTable::add_column(std::string name, const CsvCell& value) {
  columns_.push_back(std::move(name));
  for (auto& r : rows_) r.push_back(value);
}

std::string format_cell(const CsvCell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

namespace {
long long ll(std::size_t v) { return static_cast<long long>(v); }
}  // namespace

CsvTable deficit_table(const DeficitReport& r) {
  CsvTable t({"deficit", "dirichlet_term", "variance_term", "clamp_warnings", "tolerance"});
  t.add_row({r.deficit, r.dirichlet_term, r.variance_term, ll(r.clamp_warnings), r.tolerance});
  return t;
}

CsvTable variation_table(const VariationReport& r) {
  CsvTable t({"first", "fd_first", "step_first", "second", "fd_second", "step_second"});
  t.add_row({r.first, r.fd_first, r.step_first, r.second, r.fd_second, r.step_second});
  return t;
}

CsvTable backbone_table(const BackboneReport& r) {
  CsvTable t({"lhs", "rhs", "abs_diff", "first_variation", "best_lambda",
              "best_lambda_distance", "tolerance"});
  t.add_row({r.lhs, r.rhs, std::abs(r.lhs - r.rhs), r.first_variation, r.best_lambda,
             r.best_lambda_distance, r.tolerance});
  return t;
}

CsvTable solve_table(const SolveReport& r, double tol) {
  CsvTable t({"alpha", "iterations", "residual_w1_bound", "tol", "w1_deposited", "J", "E",
              "gap", "gap_tolerance", "converged", "m2_rho", "barycenter",
              "j_ascent_violations"});
  t.add_row({r.alpha, ll(r.iterations), r.residual, tol, r.w1_deposited, r.j_value, r.e_value,
             r.gap, r.gap_tolerance, r.converged, r.m2_rho, r.barycenter,
             ll(r.j_ascent_violations)});
  return t;
}

CsvTable residual_trace_table(const SolveReport& r) {
  CsvTable t({"iteration", "residual"});
  for (std::size_t i = 0; i < r.residual_trace.size(); ++i) {
    t.add_row({ll(i), r.residual_trace[i]});
  }
  return t;
}

CsvTable rate_samples_table(const RateFit& f) {
  CsvTable t({"alpha", "l1_dist_mod_translation", "shift", "shift_at_bound", "bound_4c_sqrt_alpha"});
  for (const auto& s : f.samples) {
    t.add_row({s.alpha, s.distance, s.shift, s.shift_at_bound, 4.0 * f.c_hat * std::sqrt(s.alpha)});
  }
  return t;
}

CsvTable rate_summary_table(const RateFit& f) {
  CsvTable t({"slope", "intercept", "r2", "slope_defined", "c_hat", "bound_holds"});
  t.add_row({f.slope, f.intercept, f.r2, f.slope_defined, f.c_hat, f.bound_holds});
  return t;
}

CsvTable caffarelli_table(const std::vector<CaffarelliRow>& rows) {
  CsvTable t({"k", "partial_sum", "closed_form", "abs_diff", "alpha_exponent"});
  for (const auto& r : rows) {
    t.add_row({ll(r.k), r.partial_sum, r.closed_form, std::abs(r.partial_sum - r.closed_form),
               r.alpha_exponent});
  }
  return t;
}

CsvTable probe_table(const RegularityProbe& p, double lambda) {
  CsvTable t({"lambda", "max_curvature", "modulus", "lambda_pow_minus_third", "pass_third",
              "lambda_pow_minus_one", "pass_one", "tolerance", "iterations", "residual",
              "converged"});
  t.add_row({lambda, p.max_curvature, p.modulus, p.lambda_third, p.pass_third, p.lambda_one,
             p.pass_one, p.tolerance, ll(p.iterations), p.residual, p.converged});
  return t;
}

CsvTable moment_table(const std::vector<MomentRow>& rows, double lambda) {
  CsvTable t({"lambda", "k", "v2k", "ratio", "recursion_bound", "closed_bound", "holds"});
  for (const auto& r : rows) {
    t.add_row({lambda, ll(r.k), r.v2k, r.ratio, r.bound, r.closed_bound, r.holds});
  }
  return t;
}

}  // namespace momlab
