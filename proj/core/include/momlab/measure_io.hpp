#pragma once

// Measure files. First line `density` or `atoms`; densities continue as a
// field file (`x,value` / `x,y,value`), atoms as rows `x,weight` /
// `x,y,weight` with an optional header. A bare field file is read as a
// density.

#include <filesystem>
#include <iosfwd>

#include "momlab/measures.hpp"

namespace momlab {

/// Densities are rescaled to unit mass; atom weights to unit sum. Throws
/// ParseError with a 1-based line number.
Measure read_measure(std::istream& in);
Measure read_measure_file(const std::filesystem::path& path);

void write_measure(std::ostream& out, const Measure& mu);

}  // namespace momlab
