#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "rydsim/noise.hpp"
#include "rydsim/scans.hpp"
#include "rydsim/system.hpp"

namespace rydsim {

// Parsed run configuration. Sections [system], [pulse], [fluctuations] and
// [scan] with exact, case-sensitive key names; any unknown section or key
// is a hard error naming the offender and its line. A missing section (or
// key) keeps the defaults of the owning type; the scan grid defaults
// depend on the scan variable, so those three stay optional until a
// command resolves them.
struct RunConfig {
  SystemParams system;
  PulseShape pulse;
  FluctuationSpec fluctuations;
  std::optional<ScanVariable> variable;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<int> points;
};

// Throws ConfigError with the 1-based line number of the offending line.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

// Resolves the config into a runnable scan for the given command variable:
// grid defaults are [0, 600] ns with 61 points for duration scans and
// +/- 40 MHz about delta_small with 81 points for detuning scans. Throws
// std::invalid_argument if the config pins the other scan variable.
ScanSpec to_scan_spec(const RunConfig& config, ScanVariable required);

// Canonical configuration text for the fully resolved spec: every key of
// every section with its effective value, in spec order. Parsing this text
// reproduces the same scan, which is what makes emitted CSV headers
// re-runnable.
std::string canonical_text(const ScanSpec& spec);

const char* envelope_name(Envelope envelope);
const char* variable_name(ScanVariable variable);

}  // namespace rydsim
