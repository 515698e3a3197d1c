#pragma once

#include <numbers>

namespace rydsim {

// Fixed CODATA values used by the closed-form calculators. Spectroscopic
// results are reported as nu = omega / 2 pi in MHz; SI units appear only
// inside these constant-bearing formulas.
struct PhysicalConstants {
  double e = 1.602176634e-19;        // elementary charge, C
  double m_e = 9.1093837015e-31;     // electron mass, kg
  double eps0 = 8.8541878128e-12;    // vacuum permittivity, F/m
  double c = 299792458.0;            // speed of light, m/s
  double h = 6.62607015e-34;         // Planck constant, J s
  double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);
};

// Optical-molasses drive of the D2 line during the ionization measurement.
// Frequencies are nu-convention MHz; d is the transition dipole moment.
struct MolassesParams {
  double d = 3.58e-29;        // transition dipole matrix element, C m
  double c1_sq = 0.73;        // excited-state coupling coefficient squared
  double c2_sq = 0.73;        // saturation coupling coefficient squared
  double delta_mol = 100.0;   // molasses detuning incl. light shift, MHz
  double gamma = 5.75;        // natural linewidth, MHz
  double i_mol = 0.0;         // total molasses intensity at the atom, W/m^2

  void validate() const;
};

// Elliptical Gaussian beam; the atom is assumed at beam center, so the
// relevant intensity is the peak value 2 P / (pi w_x w_y).
struct BeamGeometry {
  double power = 0.0;  // W
  double w_x = 1.0;    // 1/e^2 waist radius, m
  double w_y = 1.0;    // 1/e^2 waist radius, m

  void validate() const;
  double peak_intensity() const;  // W/m^2
};

// (d/hbar) sqrt(2 I / (c eps0)) / 2 pi, in MHz.
double molasses_rabi_frequency(const MolassesParams& p,
                               const PhysicalConstants& k = {});

// Steady-state excited-state fraction
//   f = (1/2) c1^2 Omega^2/2 / (delta^2 + Gamma^2/4 + c2^2 Omega^2/2),
// with omega_mol in MHz. Every term is a ratio of squared frequencies, so
// the nu convention needs no unit conversion. Bounded by c1^2/(2 c2^2).
double excited_fraction(const MolassesParams& p, double omega_mol);

// sigma = h nu_B / (f I_0 tau) in cm^2, from the measured trap decay time
// tau (ms) under the ionizing beam. Throws DivisionDomain if f or tau is 0.
double ionization_cross_section(double tau_ms, double f,
                                const BeamGeometry& beam, double wavelength_m,
                                const PhysicalConstants& k = {});

// Exact inverse of ionization_cross_section: 1/tau = f I_0 sigma / (h nu_B),
// returned in 1/ms with sigma in cm^2.
double ionization_rate(double sigma_cm2, double f, const BeamGeometry& beam,
                       double wavelength_m, const PhysicalConstants& k = {});

// Free-electron (Thomson) polarizability -e^2 / (m_e eps0 omega^2) with
// omega = 2 pi c / lambda, evaluated in the printed SI form. Always < 0.
double rydberg_polarizability(double wavelength_m,
                              const PhysicalConstants& k = {});

// Ponderomotive light shift e^2 I / (2 m_e eps0 c omega^2) / h in MHz;
// positive for any Rydberg state.
double ponderomotive_shift(double intensity_w_m2, double wavelength_m,
                           const PhysicalConstants& k = {});

// Adiabatic elimination of |p>: effective two-photon Rabi frequency and the
// light shifts of the two coupled levels, all in MHz.
struct TwoPhoton {
  double omega_eff;  // Omega_R Omega_B / (2 Delta)
  double shift_up;   // Omega_R^2 / (4 Delta), shift of |up>
  double shift_r;    // Omega_B^2 / (4 Delta), shift of |r>
};

// Throws DivisionDomain if delta_big = 0.
TwoPhoton effective_two_photon(double omega_R, double omega_B,
                               double delta_big);

// Delayed self-heterodyne beat note to laser linewidth (Lorentzian
// convention): linewidth = beat FWHM / 2. Both in kHz.
double heterodyne_linewidth(double beat_fwhm_khz);

}  // namespace rydsim
