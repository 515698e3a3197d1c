#pragma once

#include <vector>

#include "rydsim/noise.hpp"
#include "rydsim/system.hpp"

namespace rydsim {

enum class ScanVariable { kDuration, kDetuning };

// A virtual experiment: sweep either the pulse duration T (Rabi scan) or
// the two-photon detuning (spectrum scan) and run a Monte Carlo ensemble at
// every grid point. For duration scans lo/hi are in ns; for detuning scans
// they are MHz offsets about system.delta_small, so a scan window centered
// on a resolved resonance is expressed as e.g. [-40, +40].
struct ScanSpec {
  ScanVariable variable = ScanVariable::kDuration;
  double lo = 0.0;
  double hi = 600.0;
  int points = 61;
  SystemParams system;
  PulseShape pulse;
  FluctuationSpec fluctuations;
  int threads = 1;  ///< worker threads; must not change the result bytes

  // Throws std::invalid_argument unless lo < hi and points >= 2.
  void validate() const;
};

struct ScanPoint {
  double x = 0.0;          ///< T in ns, or absolute detuning in MHz
  double mean = 0.0;       ///< mean recapture probability
  double std_error = 0.0;  ///< standard error of the mean
};

// Grid-ordered scan output, carrying the fully resolved inputs for echoing
// into file headers.
struct ScanResult {
  std::vector<ScanPoint> points;
  ScanSpec spec;
};

// Recapture versus pulse duration (the Rabi-oscillation experiment).
// x values are T in ns. Every grid point reuses the same seed-derived
// trajectory draws, so the T dependence is free of sampling jitter; for
// rectangle pulses each trajectory is integrated once and sampled at all
// grid durations.
ScanResult rabi_scan(const ScanSpec& spec);

// Recapture versus two-photon detuning at fixed pulse length (the
// spectroscopy experiment). x values are absolute delta_small in MHz.
ScanResult spectrum_scan(const ScanSpec& spec);

// Locates the light-shifted two-photon resonance: a fluctuation-free
// detuning scan of the Rydberg population with an ideal rectangle probe
// near the pi time, a Gaussian fit to the line, and one golden-section
// refinement. Returns delta_small at maximum Rydberg population, in MHz.
// Throws NoResonance when the scan shows no dip above its noise floor and
// std::invalid_argument unless both Rabi frequencies are positive.
double find_resonance(const SystemParams& base, const PulseShape& pulse);

}  // namespace rydsim
