#pragma once

// Parsing of flag values: grids, lists, sweeps, and function arguments that
// are either a field file or an expression in x (and y).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "momlab/convexlab.hpp"
#include "momlab/grid.hpp"
#include "momlab/measures.hpp"

namespace momlab::cli {

/// `lo,hi,n` for a line or `lo,hi,n,lo,hi,n` for a plane.
Grid parse_grid(const std::string& text);

/// Comma-separated numbers.
std::vector<double> parse_list(const std::string& text);

/// `lo:hi:n`, n ≥ 2 values spaced evenly in log scale; lo, hi > 0.
std::vector<double> parse_log_range(const std::string& text);

/// A field file when `arg` names an existing file, otherwise an expression
/// sampled on `grid`. File fields are resampled onto `grid` when one is given.
Field load_field(const std::string& arg, const std::optional<Grid>& grid, const std::string& flag);

Potential load_potential(const std::string& arg, const std::optional<Grid>& grid,
                         const std::string& flag);

Measure load_measure(const std::string& path, const std::string& flag);

/// --out when given, else $MOMLAB_OUT, else the working directory.
std::filesystem::path output_dir(const std::string& flag_value);

}  // namespace momlab::cli
