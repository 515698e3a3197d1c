#include "rydsim/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "rydsim/config.hpp"

namespace rydsim {
namespace {

bool try_parse(std::string_view text, double& out) {
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  while (true) {
    const std::size_t comma = line.find(',');
    fields.emplace_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

void write_scan_csv(std::ostream& out, const ScanResult& result) {
  std::istringstream header(canonical_text(result.spec));
  std::string line;
  while (std::getline(header, line)) {
    out << "# " << line << "\n";
  }
  out << (result.spec.variable == ScanVariable::kDuration ? "T_ns"
                                                          : "delta_mhz")
      << ",recapture_mean,recapture_stderr\n";
  for (const ScanPoint& point : result.points) {
    out << format_double(point.x) << ',' << format_double(point.mean) << ','
        << format_double(point.std_error) << "\n";
  }
}

std::vector<double> CsvTable::column(std::size_t index) const {
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& row : rows) {
    if (index >= row.size()) {
      throw std::invalid_argument("CSV column index out of range");
    }
    values.push_back(row[index]);
  }
  return values;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string raw;
  std::size_t width = 0;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;

    const std::vector<std::string> fields = split_fields(text);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!try_parse(fields[i], row[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (table.rows.empty() && table.columns.empty()) {
        table.columns = fields;  // leading column-name row
        continue;
      }
      throw std::invalid_argument("CSV line " + std::to_string(line_number) +
                                  ": non-numeric data row");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw std::invalid_argument("CSV line " + std::to_string(line_number) +
                                  ": expected " + std::to_string(width) +
                                  " fields, got " +
                                  std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) {
    throw std::invalid_argument("CSV contains no data rows");
  }
  return table;
}

}  // namespace rydsim
