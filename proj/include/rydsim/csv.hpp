#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rydsim/scans.hpp"

namespace rydsim {

// Shortest decimal form that round-trips to the same double, so emitted
// files are byte-stable and re-parse exactly.
std::string format_double(double value);

// Scan CSV: `# `-prefixed canonical configuration echo, a plain column-name
// row, then one `x,mean,stderr` row per scan point.
void write_scan_csv(std::ostream& out, const ScanResult& result);

// Numeric table read back from a CSV: `#` comment lines are skipped and a
// leading non-numeric row is treated as column names.
struct CsvTable {
  std::vector<std::string> columns;              // empty if no header row
  std::vector<std::vector<double>> rows;         // uniform width

  std::vector<double> column(std::size_t index) const;
};

// Throws std::invalid_argument on ragged or non-numeric data rows.
CsvTable read_csv(std::istream& in);

}  // namespace rydsim
