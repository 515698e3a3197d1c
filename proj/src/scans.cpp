#include "rydsim/scans.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rydsim/errors.hpp"
#include "rydsim/fitting.hpp"
#include "rydsim/parallel.hpp"

namespace rydsim {
namespace {

std::vector<double> grid(double lo, double hi, int points) {
  std::vector<double> x(points);
  for (int i = 0; i < points; ++i) {
    x[i] = lo + (hi - lo) * i / (points - 1);
  }
  return x;
}

ScanPoint reduce(double x, const std::vector<double>& values) {
  const EnsembleResult r = reduce_values(values);
  return {x, r.mean, r.std_error};
}

// Rectangle-pulse Rabi scan: the Hamiltonian is constant during the pulse,
// so each trajectory is integrated once up to the longest duration and
// sampled at every grid duration. This is exact (not an approximation) and
// reuses the per-point stream layout: trajectory i draws substream(seed, i)
// exactly as a per-point ensemble would.
std::vector<ScanPoint> shared_rabi_points(const ScanSpec& spec,
                                          const std::vector<double>& t_ns) {
  const auto& fl = spec.fluctuations;
  const int n_traj = fl.fluctuation_free() ? 1 : fl.n_trajectories;
  const int n_pts = static_cast<int>(t_ns.size());

  std::vector<double> times_us(t_ns.size());
  for (std::size_t k = 0; k < t_ns.size(); ++k) times_us[k] = t_ns[k] / 1000.0;

  PulseShape window = spec.pulse;
  window.duration = times_us.back();
  window.envelope = Envelope::kRectangle;

  const DensityMatrix rho0 = initial_state(fl);
  std::vector<std::vector<double>> values(
      n_traj, std::vector<double>(t_ns.size(), 0.0));
  std::vector<std::exception_ptr> failures(n_traj);

  parallel_for(n_traj, spec.threads, [&](int i) {
    try {
      SystemParams params = spec.system;
      if (!fl.fluctuation_free()) {
        Rng stream = Rng::substream(fl.seed, static_cast<std::uint64_t>(i));
        params = sample_trajectory(spec.system, fl, stream).apply(spec.system);
      }
      const auto states = evolve_sampled(rho0, params, window, times_us);
      for (std::size_t k = 0; k < states.size(); ++k) {
        values[i][k] = recapture_probability(states[k], fl);
      }
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (int i = 0; i < n_traj; ++i) {
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (const SimulationError& e) {
        throw SimulationError("trajectory " + std::to_string(i) + ": " +
                              e.what());
      }
    }
  }

  std::vector<ScanPoint> out(t_ns.size());
  std::vector<double> column(n_traj);
  for (int k = 0; k < n_pts; ++k) {
    for (int i = 0; i < n_traj; ++i) column[i] = values[i][k];
    out[k] = reduce(t_ns[k], column);
  }
  return out;
}

}  // namespace

void ScanSpec::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("scan range must have lo < hi");
  if (points < 2) throw std::invalid_argument("scan needs at least 2 points");
  if (variable == ScanVariable::kDuration && lo < 0.0) {
    throw std::invalid_argument("durations must be >= 0");
  }
  system.validate();
  pulse.validate();
  fluctuations.validate();
}

ScanResult rabi_scan(const ScanSpec& spec) {
  spec.validate();
  if (spec.variable != ScanVariable::kDuration) {
    throw std::invalid_argument("rabi_scan requires a duration scan");
  }
  const std::vector<double> t_ns = grid(spec.lo, spec.hi, spec.points);

  ScanResult result;
  result.spec = spec;
  if (spec.pulse.envelope == Envelope::kRectangle) {
    result.points = shared_rabi_points(spec, t_ns);
    return result;
  }

  // Shaped pulses rescale their ramps with the duration, so every grid
  // point needs its own ensemble.
  result.points.reserve(t_ns.size());
  for (double t : t_ns) {
    PulseShape pulse = spec.pulse;
    pulse.duration = t / 1000.0;
    const EnsembleResult r =
        run_ensemble(spec.system, pulse, spec.fluctuations, spec.threads);
    result.points.push_back({t, r.mean, r.std_error});
  }
  return result;
}

ScanResult spectrum_scan(const ScanSpec& spec) {
  spec.validate();
  if (spec.variable != ScanVariable::kDetuning) {
    throw std::invalid_argument("spectrum_scan requires a detuning scan");
  }
  const std::vector<double> offsets = grid(spec.lo, spec.hi, spec.points);

  ScanResult result;
  result.spec = spec;
  result.points.reserve(offsets.size());
  for (double offset : offsets) {
    SystemParams params = spec.system;
    params.delta_small = spec.system.delta_small + offset;
    const EnsembleResult r =
        run_ensemble(params, spec.pulse, spec.fluctuations, spec.threads);
    result.points.push_back({params.delta_small, r.mean, r.std_error});
  }
  return result;
}

double find_resonance(const SystemParams& base, const PulseShape& pulse) {
  base.validate();
  pulse.validate();
  if (!(base.omega_R > 0.0) || !(base.omega_B > 0.0)) {
    throw std::invalid_argument(
        "find_resonance needs both Rabi frequencies > 0");
  }
  if (!(pulse.duration > 0.0)) {
    throw std::invalid_argument("find_resonance needs a pulse duration > 0");
  }

  // Analytic light-shift estimate centers the search window; the probe
  // stops near the pi time so the line is a clean single dip rather than a
  // power-broadened multi-lobe pattern.
  double center = 0.0;
  double probe_t = pulse.duration;
  if (base.delta_big != 0.0) {
    center = (base.omega_R * base.omega_R - base.omega_B * base.omega_B) /
             (4.0 * base.delta_big);
    const double omega_eff =
        base.omega_R * base.omega_B / (2.0 * std::abs(base.delta_big));
    probe_t = std::min(probe_t, 0.45 / omega_eff);
  }
  PulseShape probe;
  probe.duration = probe_t;
  probe.envelope = Envelope::kRectangle;

  const DensityMatrix rho0 = pure_state(kUp);
  auto rydberg_at = [&](double delta) {
    SystemParams p = base;
    p.delta_small = delta;
    return evolve(rho0, p, probe)(kR, kR).real();
  };

  constexpr int kPoints = 81;
  constexpr double kHalfWidth = 40.0;  // MHz
  const std::vector<double> deltas =
      grid(center - kHalfWidth, center + kHalfWidth, kPoints);
  std::vector<double> v(kPoints);
  for (int i = 0; i < kPoints; ++i) v[i] = rydberg_at(deltas[i]);

  // Peak must stand well clear of the scan's own baseline spread.
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const double v_min = sorted.front();
  const double v_med = sorted[sorted.size() / 2];
  const double v_max = sorted.back();
  const double depth = v_max - v_med;
  const double floor = std::max(1e-9, v_med - v_min);
  if (depth < 3.0 * floor) {
    throw NoResonance("no excitation peak above the scan noise floor");
  }

  // Grid maximum with a curvature tie-break: among equal maxima prefer the
  // sharper one.
  int best = 0;
  double best_curv = -1.0;
  for (int i = 0; i < kPoints; ++i) {
    if (v[i] < v_max) continue;
    const double left = i > 0 ? v[i - 1] : v[i];
    const double right = i + 1 < kPoints ? v[i + 1] : v[i];
    const double curv = std::abs(left - 2.0 * v[i] + right);
    if (curv > best_curv) {
      best_curv = curv;
      best = i;
    }
  }
  double line_center = deltas[best];

  // Refine the center estimate with a Gaussian fit to the recapture dip.
  try {
    std::vector<double> dip(kPoints);
    for (int i = 0; i < kPoints; ++i) dip[i] = 1.0 - v[i];
    const FitResult fit = fit_gaussian_dips(deltas, dip, 1);
    const double fitted = fit.params[2];
    if (fitted > deltas.front() && fitted < deltas.back()) {
      line_center = fitted;
    }
  } catch (const FitError&) {
    // Keep the grid maximum; the golden-section pass still refines it.
  }

  // One golden-section pass on the continuous curve around the center.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = line_center - 2.5, b = line_center + 2.5;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = rydberg_at(x1), f2 = rydberg_at(x2);
  while (b - a > 1e-4) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = rydberg_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = rydberg_at(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace rydsim
