#include "rydsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rydsim/errors.hpp"
#include "rydsim/parallel.hpp"

namespace rydsim {
namespace {

// Rethrows the exception held in ptr with a trajectory-index tag, keeping
// the concrete error type where it matters for callers.
[[noreturn]] void rethrow_tagged(const std::exception_ptr& ptr, int index) {
  const std::string tag = "trajectory " + std::to_string(index) + ": ";
  try {
    std::rethrow_exception(ptr);
  } catch (const NonConvergence& e) {
    throw NonConvergence(tag + e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(tag + e.what());
  } catch (const SimulationError& e) {
    throw SimulationError(tag + e.what());
  } catch (const std::exception& e) {
    throw SimulationError(tag + e.what());
  }
}

}  // namespace

void FluctuationSpec::validate() const {
  if (red_power_fwhm < 0 || blue_power_fwhm < 0 || detuning_fwhm < 0) {
    throw std::invalid_argument("fluctuation FWHMs must be >= 0");
  }
  if (pumping_efficiency < 0 || pumping_efficiency > 1) {
    throw std::invalid_argument("pumping_efficiency must be in [0, 1]");
  }
  if (recapture_factor < 0 || recapture_factor > 1) {
    throw std::invalid_argument("recapture_factor must be in [0, 1]");
  }
  if (n_trajectories < 1) {
    throw std::invalid_argument("n_trajectories must be >= 1");
  }
}

SystemParams TrajectoryParams::apply(const SystemParams& base) const {
  SystemParams p = base;
  p.omega_R = omega_R;
  p.omega_B = omega_B;
  p.delta_small = delta_small;
  return p;
}

TrajectoryParams sample_trajectory(const SystemParams& base,
                                   const FluctuationSpec& spec, Rng& stream) {
  const double p_red =
      1.0 + fwhm_to_sigma(spec.red_power_fwhm) * stream.gaussian();
  const double p_blue =
      1.0 + fwhm_to_sigma(spec.blue_power_fwhm) * stream.gaussian();
  const double d_delta =
      fwhm_to_sigma(spec.detuning_fwhm) * stream.gaussian();

  TrajectoryParams t;
  t.omega_R = base.omega_R * std::sqrt(std::max(0.0, p_red));
  t.omega_B = base.omega_B * std::sqrt(std::max(0.0, p_blue));
  t.delta_small = base.delta_small + d_delta;
  return t;
}

DensityMatrix initial_state(const FluctuationSpec& spec) {
  DensityMatrix rho = DensityMatrix::Zero();
  rho(kUp, kUp) = spec.pumping_efficiency;
  rho(kG, kG) = 1.0 - spec.pumping_efficiency;
  return rho;
}

double recapture_probability(const DensityMatrix& rho_final,
                             const FluctuationSpec& spec) {
  return spec.recapture_factor * (1.0 - rho_final(kR, kR).real());
}

EnsembleResult run_ensemble(const SystemParams& base, const PulseShape& pulse,
                            const FluctuationSpec& spec, int threads,
                            double step) {
  base.validate();
  pulse.validate();
  spec.validate();

  const DensityMatrix rho0 = initial_state(spec);
  const StepControl ctrl = StepControl::fixed(step);

  if (spec.fluctuation_free()) {
    // All trajectories would be identical; one evolution is exact.
    const DensityMatrix rho = evolve(rho0, base, pulse, ctrl);
    return {recapture_probability(rho, spec), 0.0};
  }

  const int n = spec.n_trajectories;
  std::vector<double> values(n, 0.0);
  std::vector<std::exception_ptr> failures(n);
  parallel_for(n, threads, [&](int i) {
    try {
      Rng stream = Rng::substream(spec.seed, static_cast<std::uint64_t>(i));
      const SystemParams params =
          sample_trajectory(base, spec, stream).apply(base);
      const DensityMatrix rho = evolve(rho0, params, pulse, ctrl);
      values[i] = recapture_probability(rho, spec);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (int i = 0; i < n; ++i) {
    if (failures[i]) rethrow_tagged(failures[i], i);
  }
  return reduce_values(values);
}

EnsembleResult reduce_values(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw std::invalid_argument("reduce_values: empty ensemble");
  const bool all_equal = std::all_of(
      values.begin(), values.end(),
      [&](double v) { return v == values.front(); });
  if (all_equal) return {values.front(), 0.0};

  // Fixed-order reduction: identical result for any thread count.
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += values[i];
  const double mean = sum / n;

  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    ss += d * d;
  }
  const double std_error =
      n > 1 ? std::sqrt(ss / (static_cast<double>(n - 1) * n)) : 0.0;
  return {mean, std_error};
}

}  // namespace rydsim
