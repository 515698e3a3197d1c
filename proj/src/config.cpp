#include "rydsim/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "rydsim/csv.hpp"
#include "rydsim/errors.hpp"

namespace rydsim {
namespace {

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

double parse_number(std::string_view value, int line) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(line, "expected a number, got '" + std::string(value) +
                                "'");
  }
  return out;
}

long long parse_integer(std::string_view value, int line) {
  long long out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(line, "expected an integer, got '" +
                                std::string(value) + "'");
  }
  return out;
}

std::uint64_t parse_seed(std::string_view value, int line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(line, "expected a 64-bit unsigned integer, got '" +
                                std::string(value) + "'");
  }
  return out;
}

}  // namespace

const char* envelope_name(Envelope envelope) {
  return envelope == Envelope::kRectangle ? "rectangle" : "trapezoid";
}

const char* variable_name(ScanVariable variable) {
  return variable == ScanVariable::kDuration ? "duration" : "detuning";
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;  // "section/key", for duplicate detection
  std::string raw;
  int line = 0;

  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;

    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError(line, "unterminated section header");
      }
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (section != "system" && section != "pulse" &&
          section != "fluctuations" && section != "scan") {
        throw ConfigError(line, "unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line, "expected 'key = value'");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(line, "key '" + key + "' appears before any section");
    }
    if (!seen.insert(section + "/" + key).second) {
      throw ConfigError(line, "duplicate key '" + key + "' in [" + section +
                                  "]");
    }

    if (section == "system") {
      if (key == "omega_R") {
        config.system.omega_R = parse_number(value, line);
      } else if (key == "omega_B") {
        config.system.omega_B = parse_number(value, line);
      } else if (key == "delta_big") {
        config.system.delta_big = parse_number(value, line);
      } else if (key == "delta_small") {
        config.system.delta_small = parse_number(value, line);
      } else if (key == "gamma_big") {
        config.system.gamma_big = parse_number(value, line);
      } else if (key == "gamma_small") {
        config.system.gamma_small = parse_number(value, line);
      } else if (key == "omega_HF") {
        config.system.omega_hf = parse_number(value, line);
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [system]");
      }
    } else if (section == "pulse") {
      if (key == "duration_ns") {
        config.pulse.duration = parse_number(value, line) / 1000.0;
      } else if (key == "rise_ns") {
        config.pulse.rise_time = parse_number(value, line) / 1000.0;
      } else if (key == "envelope") {
        if (value == "rectangle") {
          config.pulse.envelope = Envelope::kRectangle;
        } else if (value == "trapezoid") {
          config.pulse.envelope = Envelope::kTrapezoid;
        } else {
          throw ConfigError(line, "envelope must be rectangle or trapezoid");
        }
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [pulse]");
      }
    } else if (section == "fluctuations") {
      if (key == "red_power_fwhm") {
        config.fluctuations.red_power_fwhm = parse_number(value, line);
      } else if (key == "blue_power_fwhm") {
        config.fluctuations.blue_power_fwhm = parse_number(value, line);
      } else if (key == "detuning_fwhm_mhz") {
        config.fluctuations.detuning_fwhm = parse_number(value, line);
      } else if (key == "pumping_efficiency") {
        config.fluctuations.pumping_efficiency = parse_number(value, line);
      } else if (key == "recapture_factor") {
        config.fluctuations.recapture_factor = parse_number(value, line);
      } else if (key == "n_trajectories") {
        const long long n = parse_integer(value, line);
        if (n < 1) throw ConfigError(line, "n_trajectories must be >= 1");
        config.fluctuations.n_trajectories = static_cast<int>(n);
      } else if (key == "seed") {
        config.fluctuations.seed = parse_seed(value, line);
      } else {
        throw ConfigError(line,
                          "unknown key '" + key + "' in [fluctuations]");
      }
    } else {  // [scan]
      if (key == "variable") {
        if (value == "duration") {
          config.variable = ScanVariable::kDuration;
        } else if (value == "detuning") {
          config.variable = ScanVariable::kDetuning;
        } else {
          throw ConfigError(line, "variable must be duration or detuning");
        }
      } else if (key == "lo") {
        config.lo = parse_number(value, line);
      } else if (key == "hi") {
        config.hi = parse_number(value, line);
      } else if (key == "points") {
        const long long n = parse_integer(value, line);
        if (n < 2) throw ConfigError(line, "points must be >= 2");
        config.points = static_cast<int>(n);
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [scan]");
      }
    }
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(0, "cannot open config file '" + path + "'");
  }
  return parse_config(in);
}

ScanSpec to_scan_spec(const RunConfig& config, ScanVariable required) {
  if (config.variable && *config.variable != required) {
    throw std::invalid_argument(
        std::string("config requests a ") + variable_name(*config.variable) +
        " scan; this command runs a " + variable_name(required) + " scan");
  }
  ScanSpec spec;
  spec.variable = required;
  spec.system = config.system;
  spec.pulse = config.pulse;
  spec.fluctuations = config.fluctuations;
  if (required == ScanVariable::kDuration) {
    spec.lo = config.lo.value_or(0.0);
    spec.hi = config.hi.value_or(600.0);
    spec.points = config.points.value_or(61);
  } else {
    spec.lo = config.lo.value_or(-40.0);
    spec.hi = config.hi.value_or(40.0);
    spec.points = config.points.value_or(81);
  }
  spec.validate();
  return spec;
}

std::string canonical_text(const ScanSpec& spec) {
  std::ostringstream out;
  out << "[system]\n"
      << "omega_R = " << format_double(spec.system.omega_R) << "\n"
      << "omega_B = " << format_double(spec.system.omega_B) << "\n"
      << "delta_big = " << format_double(spec.system.delta_big) << "\n"
      << "delta_small = " << format_double(spec.system.delta_small) << "\n"
      << "gamma_big = " << format_double(spec.system.gamma_big) << "\n"
      << "gamma_small = " << format_double(spec.system.gamma_small) << "\n"
      << "omega_HF = " << format_double(spec.system.omega_hf) << "\n"
      << "[pulse]\n"
      << "duration_ns = " << format_double(spec.pulse.duration * 1000.0)
      << "\n"
      << "rise_ns = " << format_double(spec.pulse.rise_time * 1000.0) << "\n"
      << "envelope = " << envelope_name(spec.pulse.envelope) << "\n"
      << "[fluctuations]\n"
      << "red_power_fwhm = "
      << format_double(spec.fluctuations.red_power_fwhm) << "\n"
      << "blue_power_fwhm = "
      << format_double(spec.fluctuations.blue_power_fwhm) << "\n"
      << "detuning_fwhm_mhz = "
      << format_double(spec.fluctuations.detuning_fwhm) << "\n"
      << "pumping_efficiency = "
      << format_double(spec.fluctuations.pumping_efficiency) << "\n"
      << "recapture_factor = "
      << format_double(spec.fluctuations.recapture_factor) << "\n"
      << "n_trajectories = " << spec.fluctuations.n_trajectories << "\n"
      << "seed = " << spec.fluctuations.seed << "\n"
      << "[scan]\n"
      << "variable = " << variable_name(spec.variable) << "\n"
      << "lo = " << format_double(spec.lo) << "\n"
      << "hi = " << format_double(spec.hi) << "\n"
      << "points = " << spec.points << "\n";
  return out.str();
}

}  // namespace rydsim
