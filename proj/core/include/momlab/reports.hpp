#pragma once

// CSV serialization of reports. Every table starts with a header row naming
// the columns; numbers are written in shortest round-trip form.

#include <string>
#include <variant>
#include <vector>

#include "momlab/functionals.hpp"
#include "momlab/momsolve.hpp"

namespace momlab {

using CsvCell = std::variant<double, long long, bool, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  /// Row length must equal the column count.
  void add_row(std::vector<CsvCell> cells);
  /// Appends a column holding `value` in every row.
  void add_column(std::string name, const CsvCell& value);
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<CsvCell>> rows_;
};

std::string format_cell(const CsvCell& c);

CsvTable deficit_table(const DeficitReport& r);
CsvTable variation_table(const VariationReport& r);
CsvTable backbone_table(const BackboneReport& r);
/// Summary row of a solve; the residual trace is a separate table.
CsvTable solve_table(const SolveReport& r, double tol);
CsvTable residual_trace_table(const SolveReport& r);
CsvTable rate_samples_table(const RateFit& f);
CsvTable rate_summary_table(const RateFit& f);
CsvTable caffarelli_table(const std::vector<CaffarelliRow>& rows);
CsvTable probe_table(const RegularityProbe& p, double lambda);
CsvTable moment_table(const std::vector<MomentRow>& rows, double lambda);

}  // namespace momlab
