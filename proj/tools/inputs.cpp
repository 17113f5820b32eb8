#include "inputs.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cli_errors.hpp"
#include "expression.hpp"
#include "momlab/errors.hpp"
#include "momlab/field_io.hpp"
#include "momlab/measure_io.hpp"

namespace momlab::cli {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

double number(const std::string& s, const std::string& what) {
  double v = 0.0;
  if (!parse_number(s, v)) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

std::size_t count(const std::string& s, const std::string& what) {
  const double v = number(s, what);
  if (!(v >= 2.0) || v != std::floor(v)) {
    throw UsageError(what + ": node count '" + s + "' must be an integer >= 2");
  }
  return static_cast<std::size_t>(v);
}

// Converts library errors raised while reading a file into a message that
// names the flag and the file; ParseError keeps its line number.
template <class F>
auto with_file_context(const std::string& flag, const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(flag + " " + path + ": " + e.message(), e.line());
  }
}

}  // namespace

Grid parse_grid(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() == 3) {
    return Grid::line(number(parts[0], "--grid"), number(parts[1], "--grid"),
                      count(parts[2], "--grid"));
  }
  if (parts.size() == 6) {
    return Grid::plane({number(parts[0], "--grid"), number(parts[1], "--grid"), count(parts[2], "--grid")},
                       {number(parts[3], "--grid"), number(parts[4], "--grid"), count(parts[5], "--grid")});
  }
  throw UsageError("--grid: expected lo,hi,n or lo,hi,n,lo,hi,n, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(number(p, "list"));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_log_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("expected lo:hi:n, got '" + text + "'");
  const double lo = number(parts[0], "range"), hi = number(parts[1], "range");
  const std::size_t n = count(parts[2], "range");
  if (!(lo > 0.0) || !(hi > lo)) throw UsageError("range needs 0 < lo < hi, got '" + text + "'");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

Field load_field(const std::string& arg, const std::optional<Grid>& grid, const std::string& flag) {
  if (std::filesystem::is_regular_file(arg)) {
    Field f = with_file_context(flag, arg, [&] { return read_field_file(arg).field; });
    return grid ? resample(f, *grid) : f;
  }
  if (!grid) throw UsageError(flag + ": expression '" + arg + "' needs --grid");
  Expression e;
  try {
    e = Expression::parse(arg);
  } catch (const ExpressionError& err) {
    throw ExpressionError(flag + ": " + err.what());
  }
  if (e.uses_y() && grid->dim() != 2) throw UsageError(flag + ": y is only defined on 2D grids");
  std::vector<double> v(grid->size());
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const Point p = grid->node(k);
    v[k] = e(p[0], p[1]);
    if (std::isnan(v[k]) || v[k] == -kInf) {
      throw UsageError(flag + ": '" + arg + "' is undefined at x = " + format_number(p[0]) +
                       (grid->dim() == 2 ? ", y = " + format_number(p[1]) : std::string()));
    }
  }
  return Field(*grid, std::move(v));
}

Potential load_potential(const std::string& arg, const std::optional<Grid>& grid,
                         const std::string& flag) {
  return Potential(load_field(arg, grid, flag));
}

Measure load_measure(const std::string& path, const std::string& flag) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError(flag + ": no such file '" + path + "'");
  return with_file_context(flag, path, [&] { return read_measure_file(path); });
}

std::filesystem::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MOMLAB_OUT"); env != nullptr && *env != '\0') return env;
  return std::filesystem::current_path();
}

}  // namespace momlab::cli
