// Command-line front end: deterministic CSV scans (rabi, spectrum), fits of
// previously written CSV data (fit), and closed-form calculators (calc).
// Exit codes: 0 success, 2 configuration/usage error, 3 simulation error,
// 4 fit error or non-convergence.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rydsim/calculators.hpp"
#include "rydsim/config.hpp"
#include "rydsim/csv.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/fitting.hpp"
#include "rydsim/scans.hpp"

namespace {

using namespace rydsim;

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned n = std::thread::hardware_concurrency();
  return n > 0 ? static_cast<int>(n) : 1;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file '" + out_path + "'");
  }
  out << text;
}

int run_scan(const std::string& config_path, ScanVariable variable,
             const std::string& out_path, const std::uint64_t* seed_override,
             int threads) {
  RunConfig config = parse_config_file(config_path);
  if (seed_override != nullptr) config.fluctuations.seed = *seed_override;
  ScanSpec spec = to_scan_spec(config, variable);
  spec.threads = resolve_threads(threads);

  const ScanResult result = variable == ScanVariable::kDuration
                                ? rabi_scan(spec)
                                : spectrum_scan(spec);
  std::ostringstream csv;
  write_scan_csv(csv, result);
  emit(csv.str(), out_path);
  return 0;
}

void print_parameter(std::ostream& out, const std::string& name,
                     const FitResult& fit, int index) {
  out << name << " = " << format_double(fit.params[index]) << "\n"
      << name << "_stderr = " << format_double(fit.std_errors[index]) << "\n";
}

int run_fit(const std::string& model, const std::string& csv_path,
            int n_dips, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) {
    throw std::invalid_argument("cannot open CSV file '" + csv_path + "'");
  }
  const CsvTable table = read_csv(in);
  if (table.rows[0].size() < 2) {
    throw std::invalid_argument("fit needs at least two CSV columns (x, y)");
  }
  std::vector<double> x = table.column(0);
  const std::vector<double> y = table.column(1);

  // Scan CSVs carry durations in ns; the oscillation fit works in us.
  const bool x_is_ns = !table.columns.empty() && table.columns[0] == "T_ns";
  if (model == "damped_cosine" && x_is_ns) {
    for (double& v : x) v /= 1000.0;
  }

  std::ostringstream report;
  report << "model = " << model << "\n";
  FitResult fit;
  if (model == "damped_cosine") {
    fit = fit_damped_cosine(x, y);
  } else if (model == "gaussian_dips") {
    fit = fit_gaussian_dips(x, y, n_dips);
  } else if (model == "exp_decay") {
    fit = fit_exp_decay(x, y);
  } else if (model == "beam_waist") {
    fit = fit_beam_waist(x, y);
  } else {
    throw std::invalid_argument(
        "unknown model '" + model +
        "' (expected damped_cosine, gaussian_dips, exp_decay or beam_waist)");
  }

  report << "converged = " << (fit.converged ? "yes" : "no") << "\n"
         << "iterations = " << fit.iterations << "\n"
         << "rss = " << format_double(fit.rss) << "\n";
  if (model == "damped_cosine") {
    print_parameter(report, "A", fit, 0);
    print_parameter(report, "B", fit, 1);
    print_parameter(report, "tau_us", fit, 2);
    print_parameter(report, "nu_mhz", fit, 3);
    report << "tau_ns = " << format_double(fit.params[2] * 1000.0) << "\n";
  } else if (model == "gaussian_dips") {
    print_parameter(report, "A", fit, 0);
    for (int d = 0; d < n_dips; ++d) {
      const std::string tag = std::to_string(d + 1);
      print_parameter(report, "B_" + tag, fit, 1 + 3 * d);
      print_parameter(report, "nu_" + tag + "_mhz", fit, 2 + 3 * d);
      print_parameter(report, "s_" + tag + "_mhz", fit, 3 + 3 * d);
      report << "fwhm_" + tag + "_mhz = "
             << format_double(gaussian_fwhm(fit.params[3 + 3 * d])) << "\n";
    }
  } else if (model == "exp_decay") {
    print_parameter(report, "y_bg", fit, 0);
    print_parameter(report, "A", fit, 1);
    print_parameter(report, "tau_ms", fit, 2);
  } else {
    print_parameter(report, "rate0", fit, 0);
    print_parameter(report, "x0_um", fit, 1);
    print_parameter(report, "w_um", fit, 2);
  }
  emit(report.str(), out_path);
  return fit.converged ? 0 : 4;
}

int run_calc_photoion(double tau_ms, double f, double power_mw, double wx_um,
                      double wy_um, double wavelength_nm,
                      const std::string& out_path) {
  BeamGeometry beam;
  beam.power = power_mw * 1e-3;
  beam.w_x = wx_um * 1e-6;
  beam.w_y = wy_um * 1e-6;
  const PhysicalConstants k;
  const double wavelength = wavelength_nm * 1e-9;
  const double sigma =
      ionization_cross_section(tau_ms, f, beam, wavelength, k);

  std::ostringstream report;
  report << "tau_ms = " << format_double(tau_ms) << "\n"
         << "f = " << format_double(f) << "\n"
         << "power_mw = " << format_double(power_mw) << "\n"
         << "wx_um = " << format_double(wx_um) << "\n"
         << "wy_um = " << format_double(wy_um) << "\n"
         << "wavelength_nm = " << format_double(wavelength_nm) << "\n"
         << "peak_intensity_w_m2 = " << format_double(beam.peak_intensity())
         << "\n"
         << "nu_b_hz = " << format_double(k.c / wavelength) << "\n"
         << "sigma_cm2 = " << format_double(sigma) << "\n"
         << "rate_per_ms = "
         << format_double(ionization_rate(sigma, f, beam, wavelength, k))
         << "\n";
  emit(report.str(), out_path);
  return 0;
}

int run_calc_lightshift(double power_mw, double w_um, double wavelength_nm,
                        const std::string& out_path) {
  BeamGeometry beam;
  beam.power = power_mw * 1e-3;
  beam.w_x = w_um * 1e-6;
  beam.w_y = w_um * 1e-6;
  const double wavelength = wavelength_nm * 1e-9;
  const double intensity = beam.peak_intensity();

  std::ostringstream report;
  report << "power_mw = " << format_double(power_mw) << "\n"
         << "w_um = " << format_double(w_um) << "\n"
         << "wavelength_nm = " << format_double(wavelength_nm) << "\n"
         << "peak_intensity_w_m2 = " << format_double(intensity) << "\n"
         << "polarizability_si = "
         << format_double(rydberg_polarizability(wavelength)) << "\n"
         << "shift_mhz = "
         << format_double(ponderomotive_shift(intensity, wavelength)) << "\n";
  emit(report.str(), out_path);
  return 0;
}

int run_calc_efftwophoton(double omega_r, double omega_b, double delta,
                          const std::string& out_path) {
  const TwoPhoton t = effective_two_photon(omega_r, omega_b, delta);
  std::ostringstream report;
  report << "omega_R_mhz = " << format_double(omega_r) << "\n"
         << "omega_B_mhz = " << format_double(omega_b) << "\n"
         << "delta_big_mhz = " << format_double(delta) << "\n"
         << "omega_eff_mhz = " << format_double(t.omega_eff) << "\n"
         << "shift_up_mhz = " << format_double(t.shift_up) << "\n"
         << "shift_r_mhz = " << format_double(t.shift_r) << "\n"
         << "resonance_estimate_mhz = "
         << format_double(t.shift_up - t.shift_r) << "\n";
  emit(report.str(), out_path);
  return 0;
}

int run_calc_heterodyne(double beat_khz, const std::string& out_path) {
  std::ostringstream report;
  report << "beat_fwhm_khz = " << format_double(beat_khz) << "\n"
         << "linewidth_khz = "
         << format_double(heterodyne_linewidth(beat_khz)) << "\n";
  emit(report.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Single-atom two-photon Rydberg excitation: scans, fits and "
      "calculators"};
  app.require_subcommand(1);

  std::string config_path, csv_path, out_path, model;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  int n_dips = 1;

  CLI::App* rabi = app.add_subcommand(
      "rabi", "Recapture probability versus pulse duration (CSV)");
  rabi->add_option("config", config_path, "run configuration file")
      ->required();
  rabi->add_option("--out", out_path, "output CSV path (default: stdout)");
  rabi->add_option("--seed", seed, "override the configured seed")
      ->each([&](const std::string&) { seed_set = true; });
  rabi->add_option("--threads", threads,
                   "worker threads (0 = all cores; never changes results)");

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "Recapture probability versus two-photon detuning (CSV)");
  spectrum->add_option("config", config_path, "run configuration file")
      ->required();
  spectrum->add_option("--out", out_path,
                       "output CSV path (default: stdout)");
  spectrum->add_option("--seed", seed, "override the configured seed")
      ->each([&](const std::string&) { seed_set = true; });
  spectrum->add_option(
      "--threads", threads,
      "worker threads (0 = all cores; never changes results)");

  CLI::App* fit = app.add_subcommand(
      "fit", "Fit a model to a CSV written by rabi/spectrum (or any x,y CSV)");
  fit->add_option("model", model,
                  "damped_cosine | gaussian_dips | exp_decay | beam_waist")
      ->required();
  fit->add_option("csv", csv_path, "input CSV path")->required();
  fit->add_option("--dips", n_dips, "number of Gaussian dips (1 or 2)");
  fit->add_option("--out", out_path, "output path (default: stdout)");

  CLI::App* calc = app.add_subcommand("calc", "Closed-form calculators");
  calc->require_subcommand(1);

  double tau_ms = 2.03, f = 0.08, power_mw = 7.4, wx_um = 22.0, wy_um = 19.0;
  double wavelength_nm = 475.0;
  CLI::App* photoion = calc->add_subcommand(
      "photoion", "Photo-ionization cross section from trap decay");
  photoion->add_option("--tau-ms", tau_ms, "trap decay time, ms")->required();
  photoion->add_option("--f", f, "excited-state fraction")->required();
  photoion->add_option("--power-mw", power_mw, "beam power, mW")->required();
  photoion->add_option("--wx-um", wx_um, "waist radius x, um")->required();
  photoion->add_option("--wy-um", wy_um, "waist radius y, um")->required();
  photoion->add_option("--wavelength-nm", wavelength_nm,
                       "ionizing wavelength, nm (default 475)");

  double trap_power_mw = 0.5, trap_w_um = 0.9, trap_wavelength_nm = 810.0;
  CLI::App* lightshift = calc->add_subcommand(
      "lightshift", "Ponderomotive light shift of a Rydberg state");
  lightshift->add_option("--power-mw", trap_power_mw,
                         "trap power, mW (default 0.5)");
  lightshift->add_option("--w-um", trap_w_um,
                         "trap waist radius, um (default 0.9)");
  lightshift->add_option("--wavelength-nm", trap_wavelength_nm,
                         "trap wavelength, nm (default 810)");

  double omega_r = 0.0, omega_b = 0.0, delta = 0.0;
  CLI::App* efftwophoton = calc->add_subcommand(
      "efftwophoton", "Effective two-photon Rabi frequency and light shifts");
  efftwophoton->add_option("--or", omega_r, "red Rabi frequency, MHz")
      ->required();
  efftwophoton->add_option("--ob", omega_b, "blue Rabi frequency, MHz")
      ->required();
  efftwophoton->add_option("--d", delta, "intermediate detuning, MHz")
      ->required();

  double beat_khz = 0.0;
  CLI::App* heterodyne = calc->add_subcommand(
      "heterodyne", "Laser linewidth from a self-heterodyne beat note");
  heterodyne->add_option("--beat-khz", beat_khz, "beat FWHM, kHz")
      ->required();

  for (CLI::App* sub : {photoion, lightshift, efftwophoton, heterodyne}) {
    sub->add_option("--out", out_path, "output path (default: stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (rabi->parsed()) {
      return run_scan(config_path, ScanVariable::kDuration, out_path,
                      seed_set ? &seed : nullptr, threads);
    }
    if (spectrum->parsed()) {
      return run_scan(config_path, ScanVariable::kDetuning, out_path,
                      seed_set ? &seed : nullptr, threads);
    }
    if (fit->parsed()) {
      return run_fit(model, csv_path, n_dips, out_path);
    }
    if (photoion->parsed()) {
      return run_calc_photoion(tau_ms, f, power_mw, wx_um, wy_um,
                               wavelength_nm, out_path);
    }
    if (lightshift->parsed()) {
      return run_calc_lightshift(trap_power_mw, trap_w_um,
                                 trap_wavelength_nm, out_path);
    }
    if (efftwophoton->parsed()) {
      return run_calc_efftwophoton(omega_r, omega_b, delta, out_path);
    }
    if (heterodyne->parsed()) {
      return run_calc_heterodyne(beat_khz, out_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DivisionDomain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SimulationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
