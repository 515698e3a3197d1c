#pragma once

namespace rydsim {

// Laser and atom parameters for the two-photon ladder
// |up> --(red, Rabi omega_R, detuning delta_big)--> |p>
//      --(blue, Rabi omega_B)--> |r>.
//
// Every frequency is stored as an ordinary frequency nu = omega/2pi in MHz.
// The single conversion to angular units (rad/us) happens inside the matrix
// builders in master_equation.hpp; nothing else multiplies by 2pi.
//
// Sign convention for the two-photon detuning delta_small: with
// omega_R > omega_B and delta_big > 0, the light-shifted two-photon
// resonance sits at positive delta_small, near
// (omega_R^2 - omega_B^2) / (4 delta_big).
struct SystemParams {
  double omega_R = 0.0;         ///< red-laser Rabi frequency, MHz
  double omega_B = 0.0;         ///< blue-laser Rabi frequency, MHz
  double delta_big = 0.0;       ///< intermediate-state detuning, MHz
  double delta_small = 0.0;     ///< two-photon detuning, MHz
  double gamma_big = 5.75;      ///< intermediate-state decay rate, MHz
  double gamma_small = 0.0048;  ///< Rydberg decay rate, MHz
  double omega_hf = 6834.0;     ///< qubit hyperfine splitting, MHz

  // Throws std::invalid_argument on negative Rabi or decay rates.
  void validate() const;
};

enum class Envelope { kRectangle, kTrapezoid };

// Time window and envelope of the red pulse; the blue laser is treated as
// always on. value(t) is the dimensionless amplitude in [0, 1] multiplying
// omega_R at time t (us). Trapezoid ramps use an effective rise time of
// min(rise_time, duration / 2), so duration scans remain well formed down
// to very short pulses.
struct PulseShape {
  double duration = 0.6;   ///< pulse window T, us
  double rise_time = 0.0;  ///< trapezoid edge ramp length, us
  Envelope envelope = Envelope::kRectangle;

  double value(double t) const;

  // Throws std::invalid_argument on negative duration or rise time.
  void validate() const;
};

}  // namespace rydsim
