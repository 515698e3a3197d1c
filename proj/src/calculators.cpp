#include "rydsim/calculators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rydsim/errors.hpp"

namespace rydsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

void MolassesParams::validate() const {
  if (i_mol < 0.0) {
    throw std::invalid_argument("molasses intensity must be >= 0");
  }
  if (c1_sq <= 0.0 || c1_sq > 1.0 || c2_sq <= 0.0 || c2_sq > 1.0) {
    throw std::invalid_argument(
        "coupling coefficients squared must be in (0, 1]");
  }
}

void BeamGeometry::validate() const {
  if (power < 0.0) throw std::invalid_argument("beam power must be >= 0");
  if (w_x <= 0.0 || w_y <= 0.0) {
    throw std::invalid_argument("beam waists must be > 0");
  }
}

double BeamGeometry::peak_intensity() const {
  validate();
  return 2.0 * power / (std::numbers::pi * w_x * w_y);
}

double molasses_rabi_frequency(const MolassesParams& p,
                               const PhysicalConstants& k) {
  p.validate();
  const double omega = (p.d / k.hbar) * std::sqrt(2.0 * p.i_mol /
                                                  (k.c * k.eps0));  // rad/s
  return omega / kTwoPi / 1e6;
}

double excited_fraction(const MolassesParams& p, double omega_mol) {
  p.validate();
  if (!(omega_mol >= 0.0) || !std::isfinite(omega_mol)) {
    throw std::invalid_argument("omega_mol must be finite and >= 0");
  }
  const double half_sq = omega_mol * omega_mol / 2.0;
  return 0.5 * p.c1_sq * half_sq /
         (p.delta_mol * p.delta_mol + p.gamma * p.gamma / 4.0 +
          p.c2_sq * half_sq);
}

double ionization_cross_section(double tau_ms, double f,
                                const BeamGeometry& beam, double wavelength_m,
                                const PhysicalConstants& k) {
  if (f == 0.0 || tau_ms == 0.0) {
    throw DivisionDomain("ionization cross section needs f > 0 and tau > 0");
  }
  if (f < 0.0 || f >= 1.0 || tau_ms < 0.0) {
    throw std::invalid_argument("need f in (0, 1) and tau > 0");
  }
  if (wavelength_m <= 0.0) {
    throw std::invalid_argument("wavelength must be > 0");
  }
  const double nu_b = k.c / wavelength_m;                     // Hz
  const double sigma_m2 = k.h * nu_b /
                          (f * beam.peak_intensity() * tau_ms * 1e-3);
  return sigma_m2 * 1e4;  // cm^2
}

double ionization_rate(double sigma_cm2, double f, const BeamGeometry& beam,
                       double wavelength_m, const PhysicalConstants& k) {
  if (sigma_cm2 < 0.0 || f < 0.0 || f >= 1.0) {
    throw std::invalid_argument("need sigma >= 0 and f in [0, 1)");
  }
  if (wavelength_m <= 0.0) {
    throw std::invalid_argument("wavelength must be > 0");
  }
  const double nu_b = k.c / wavelength_m;                     // Hz
  const double rate_s = f * beam.peak_intensity() * (sigma_cm2 * 1e-4) /
                        (k.h * nu_b);
  return rate_s * 1e-3;  // 1/ms
}

double rydberg_polarizability(double wavelength_m,
                              const PhysicalConstants& k) {
  if (wavelength_m <= 0.0) {
    throw std::invalid_argument("wavelength must be > 0");
  }
  const double omega = kTwoPi * k.c / wavelength_m;  // rad/s
  return -k.e * k.e / (k.m_e * k.eps0 * omega * omega);
}

double ponderomotive_shift(double intensity_w_m2, double wavelength_m,
                           const PhysicalConstants& k) {
  if (intensity_w_m2 < 0.0) {
    throw std::invalid_argument("intensity must be >= 0");
  }
  if (wavelength_m <= 0.0) {
    throw std::invalid_argument("wavelength must be > 0");
  }
  const double omega = kTwoPi * k.c / wavelength_m;  // rad/s
  const double shift_hz = k.e * k.e * intensity_w_m2 /
                          (2.0 * k.m_e * k.eps0 * k.c * omega * omega) / k.h;
  return shift_hz / 1e6;
}

TwoPhoton effective_two_photon(double omega_R, double omega_B,
                               double delta_big) {
  if (delta_big == 0.0) {
    throw DivisionDomain(
        "effective two-photon quantities need a nonzero detuning Delta");
  }
  return {omega_R * omega_B / (2.0 * delta_big),
          omega_R * omega_R / (4.0 * delta_big),
          omega_B * omega_B / (4.0 * delta_big)};
}

double heterodyne_linewidth(double beat_fwhm_khz) {
  if (beat_fwhm_khz < 0.0) {
    throw std::invalid_argument("beat FWHM must be >= 0");
  }
  return beat_fwhm_khz / 2.0;
}

}  // namespace rydsim
