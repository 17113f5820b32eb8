#include "momlab/measure_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "momlab/errors.hpp"
#include "momlab/field_io.hpp"

namespace momlab {
namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trimmed(cell));
  return out;
}

}  // namespace

Measure read_measure(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::string kind;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trimmed(line);
    if (t.empty() || t.front() == '#') continue;
    kind = t;
    break;
  }
  // A bare field file (header `x,value` or `x,y,value`) is read as a density.
  std::stringstream bare;
  const bool is_field = kind.rfind("x,", 0) == 0;
  if (is_field) {
    bare << kind << '\n' << in.rdbuf();
    --lineno;
  }
  if (kind == "density" || is_field) {
    try {
      FieldFile ff = read_field(is_field ? static_cast<std::istream&>(bare) : in);
      return Density::normalized(ff.field);
    } catch (const ParseError& e) {
      throw ParseError(e.message(), e.line() + lineno);
    } catch (const InvariantError& e) {
      throw ParseError(e.what(), lineno + 1);
    } catch (const NormalizationError& e) {
      throw ParseError(e.what(), lineno + 1);
    }
  }
  if (kind != "atoms") throw ParseError("first line must be `density`, `atoms` or a field header", lineno == 0 ? 1 : lineno);

  std::vector<Atom> atoms;
  int dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trimmed(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t);
    if (atoms.empty() && dim == 0 && !cells.empty() && cells[0] == "x") {
      if (cells.size() == 2 && cells[1] == "weight") {
        dim = 1;
      } else if (cells.size() == 3 && cells[1] == "y" && cells[2] == "weight") {
        dim = 2;
      } else {
        throw ParseError("expected header `x,weight` or `x,y,weight`", lineno);
      }
      continue;
    }
    if (dim == 0) dim = static_cast<int>(cells.size()) - 1;
    if (dim < 1 || dim > 2 || cells.size() != static_cast<std::size_t>(dim + 1)) {
      throw ParseError("expected " + std::to_string(dim + 1) + " columns", lineno);
    }
    double v[3] = {0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], v[c]) || !std::isfinite(v[c])) {
        throw ParseError("not a finite number: '" + cells[c] + "'", lineno);
      }
    }
    const double w = v[dim];
    if (!(w > 0.0)) throw ParseError("atom weight must be positive", lineno);
    atoms.push_back({{v[0], dim == 2 ? v[1] : 0.0}, w});
  }
  if (atoms.empty()) throw ParseError("no atoms listed", lineno + 1);
  return AtomicMeasure::normalized(std::move(atoms), dim);
}

Measure read_measure_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  return read_measure(in);
}

void write_measure(std::ostream& out, const Measure& mu) {
  if (const auto* d = std::get_if<Density>(&mu)) {
    out << "density\n";
    write_field(out, d->field());
    return;
  }
  const auto& a = std::get<AtomicMeasure>(mu);
  out << "atoms\n" << (a.dim() == 1 ? "x,weight\n" : "x,y,weight\n");
  for (const auto& at : a.atoms()) {
    out << format_number(at.x[0]) << ',';
    if (a.dim() == 2) out << format_number(at.x[1]) << ',';
    out << format_number(at.w) << '\n';
  }
}

}  // namespace momlab
