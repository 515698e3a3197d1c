#pragma once

#include <cstdint>
#include <vector>

#include "rydsim/master_equation.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/system.hpp"

namespace rydsim {

// Shot-to-shot experimental imperfections: quasi-static laser power and
// frequency jitter (one draw per trajectory, constant over the pulse),
// imperfect optical pumping, and the finite recapture probability of an
// unexcited atom. All widths are FWHM of the underlying Gaussian.
struct FluctuationSpec {
  double red_power_fwhm = 0.025;   ///< relative red-laser power jitter
  double blue_power_fwhm = 0.05;   ///< relative blue-laser power jitter
  double detuning_fwhm = 0.0;      ///< two-photon detuning jitter, MHz
  double pumping_efficiency = 0.95;
  double recapture_factor = 0.98;  ///< recapture probability with no excitation
  int n_trajectories = 100;
  std::uint64_t seed = 1;

  // True when every jitter width is zero, so all trajectories coincide.
  bool fluctuation_free() const {
    return red_power_fwhm == 0.0 && blue_power_fwhm == 0.0 &&
           detuning_fwhm == 0.0;
  }

  // Throws std::invalid_argument on negative widths, probabilities outside
  // [0, 1], or n_trajectories < 1.
  void validate() const;
};

// One Monte Carlo draw of the fluctuating laser parameters.
struct TrajectoryParams {
  double omega_R = 0.0;      ///< MHz
  double omega_B = 0.0;      ///< MHz
  double delta_small = 0.0;  ///< MHz

  // base with the three sampled values substituted.
  SystemParams apply(const SystemParams& base) const;
};

// Draws relative power factors p ~ N(1, sigma) per laser and maps them to
// Rabi frequencies as Omega <- Omega0 * sqrt(p) (power, not amplitude,
// fluctuates; negative draws clamp to zero). The two-photon detuning gets
// an additive N(0, sigma) offset. Light-shift jitter follows automatically
// from the Hamiltonian's dependence on the sampled Rabi frequencies.
// Consumes exactly three Gaussian deviates, in the order red power, blue
// power, detuning.
TrajectoryParams sample_trajectory(const SystemParams& base,
                                   const FluctuationSpec& spec, Rng& stream);

// rho0 = eff * |up><up| + (1 - eff) * |g><g|.
DensityMatrix initial_state(const FluctuationSpec& spec);

// recapture_factor * (1 - rho_rr): every non-Rydberg atom is recaptured
// with the no-excitation probability, every Rydberg atom is lost.
double recapture_probability(const DensityMatrix& rho_final,
                             const FluctuationSpec& spec);

struct EnsembleResult {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean and standard error of the mean, accumulated in index order so the
// result does not depend on how trajectories were scheduled. When every
// value is bitwise identical (zero pulse duration, a decoupled drive, ...)
// that value is returned exactly with zero standard error instead of
// being routed through the summation.
EnsembleResult reduce_values(const std::vector<double>& values);

// Monte Carlo average of the recapture probability over n_trajectories
// independent draws. Trajectory i always uses the substream derived from
// (seed, i) and results are reduced in index order, so the output is
// bit-identical for a fixed seed regardless of thread count. With all
// fluctuations off the ensemble collapses to one deterministic evolution
// and the standard error is exactly zero. Simulation errors are rethrown
// tagged with the lowest failing trajectory index.
EnsembleResult run_ensemble(const SystemParams& base, const PulseShape& pulse,
                            const FluctuationSpec& spec, int threads = 1,
                            double step = 0.0);

}  // namespace rydsim
