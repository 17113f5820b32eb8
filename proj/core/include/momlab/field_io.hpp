#pragma once

// CSV serialization of fields. Header `x,value` (1D) or `x,y,value` (2D),
// rows in node order, `inf` for +∞. A `# convex` comment line tags potentials.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "momlab/grid.hpp"

namespace momlab {

struct FieldFile {
  Field field;
  bool convex = false;
};

/// Parses a field; the grid is reconstructed from the coordinates, which must
/// be uniform. Throws ParseError with the offending line.
FieldFile read_field(std::istream& in);
FieldFile read_field_file(const std::filesystem::path& path);

void write_field(std::ostream& out, const Field& f, bool convex = false);

/// Shortest round-trip decimal form; +∞ is written as `inf`.
std::string format_number(double v);
/// Parses a decimal number or `inf`/`+inf`; returns false on garbage.
bool parse_number(std::string_view s, double& out);

/// Writes to `path` through a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace momlab
