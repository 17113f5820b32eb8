#include "momlab/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "momlab/errors.hpp"

namespace momlab {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(',', start);
    out.push_back(trim(s.substr(start, p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

// Recovers a uniform axis from sorted distinct coordinates.
Axis axis_from(const std::vector<double>& xs, std::size_t line) {
  if (xs.size() < 3) throw ParseError("need at least 3 nodes per axis", line);
  const Axis a{xs.front(), xs.back(), xs.size()};
  const double h = a.spacing();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - a.node(i)) > 1e-6 * h) {
      throw ParseError("coordinates are not on a uniform grid", line);
    }
  }
  return a;
}

}  // namespace

std::string format_number(double v) {
  if (v == kInf) return "inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") {
    out = kInf;
    return true;
  }
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
}

FieldFile read_field(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool convex = false;
  int dim = 0;
  std::vector<std::array<double, 3>> rows;
  std::size_t header_line = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (trim(t.substr(1)) == "convex") convex = true;
      continue;
    }
    const auto cells = split(t);
    if (dim == 0) {
      if (cells.size() == 2 && cells[0] == "x" && cells[1] == "value") {
        dim = 1;
      } else if (cells.size() == 3 && cells[0] == "x" && cells[1] == "y" &&
                 cells[2] == "value") {
        dim = 2;
      } else {
        throw ParseError("expected header `x,value` or `x,y,value`", lineno);
      }
      header_line = lineno;
      continue;
    }
    if (cells.size() != static_cast<std::size_t>(dim + 1)) {
      throw ParseError("expected " + std::to_string(dim + 1) + " columns",
                       lineno);
    }
    std::array<double, 3> r{0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], r[c])) {
        throw ParseError("not a number: '" + std::string(cells[c]) + "'",
                         lineno);
      }
    }
    if (!std::isfinite(r[0]) || (dim == 2 && !std::isfinite(r[1]))) {
      throw ParseError("coordinates must be finite", lineno);
    }
    if (dim == 1) r[2] = r[1];
    rows.push_back(r);
  }
  if (dim == 0) throw ParseError("missing header", lineno + 1);
  const std::size_t last = lineno;

  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(r[0]);
    ys.push_back(r[1]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  std::vector<double> values(rows.size());
  try {
    if (dim == 1) {
      const Axis a = axis_from(xs, last);
      if (xs.size() != rows.size()) throw ParseError("duplicate x coordinate", last);
      const Grid g = Grid::line(a.lo, a.hi, a.n);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k][0] != xs[k]) {
          throw ParseError("rows must be sorted by x", header_line + 1 + k);
        }
        values[k] = rows[k][2];
      }
      return {Field(g, std::move(values)), convex};
    }
    const Axis ax = axis_from(xs, last);
    const Axis ay = axis_from(ys, last);
    if (ax.n * ay.n != rows.size()) {
      throw ParseError("2D field must list every node exactly once", last);
    }
    const Grid g = Grid::plane(ax, ay);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k][0] != xs[g.ix(k)] || rows[k][1] != ys[g.iy(k)]) {
        throw ParseError("rows must be ordered by x then y",
                         header_line + 1 + k);
      }
      values[k] = rows[k][2];
    }
    return {Field(g, std::move(values)), convex};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), last);
  }
}

FieldFile read_field_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  return read_field(in);
}

void write_field(std::ostream& out, const Field& f, bool convex) {
  if (convex) out << "# convex\n";
  const Grid& g = f.grid();
  out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Point p = g.node(k);
    out << format_number(p[0]) << ',';
    if (g.dim() == 2) out << format_number(p[1]) << ',';
    out << format_number(f[k]) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw DomainError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace momlab
