#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "rydsim/levels.hpp"
#include "rydsim/system.hpp"

namespace rydsim {

// Dense complex 5x5 matrix over a caller-chosen real scalar. Everything in
// the library instantiates Scalar = double, but the builders below are kept
// generic so higher-precision cross checks can reuse them.
template <typename Scalar>
using LevelMatrix =
    Eigen::Matrix<std::complex<Scalar>, kNumLevels, kNumLevels>;

using DensityMatrix = LevelMatrix<double>;

// rho = |l><l|.
DensityMatrix pure_state(Level l);

// |tr(rho) - 1|.
double trace_error(const DensityMatrix& rho);

// max_ij |rho_ij - conj(rho_ji)|.
double hermiticity_error(const DensityMatrix& rho);

// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const DensityMatrix& rho);

// Rotating-frame Hamiltonian divided by hbar, in rad/us. envelope_value
// scales the red coupling only (pulse shaping). Diagonal:
//   H(down,down) = -2pi * omega_hf
//   H(p,p)       = -2pi * delta_big
//   H(r,r)       = +2pi * delta_small
// Couplings: H(up,p) = envelope_value * 2pi * omega_R / 2 and
// H(p,r) = 2pi * omega_B / 2, plus Hermitian conjugates.
template <typename Scalar = double>
LevelMatrix<Scalar> hamiltonian(const SystemParams& p,
                                double envelope_value = 1.0) {
  constexpr Scalar two_pi = static_cast<Scalar>(2) * std::numbers::pi_v<Scalar>;
  LevelMatrix<Scalar> h = LevelMatrix<Scalar>::Zero();
  h(kDown, kDown) = -two_pi * static_cast<Scalar>(p.omega_hf);
  h(kP, kP) = -two_pi * static_cast<Scalar>(p.delta_big);
  h(kR, kR) = two_pi * static_cast<Scalar>(p.delta_small);
  h(kUp, kP) = two_pi * static_cast<Scalar>(envelope_value * p.omega_R / 2.0);
  h(kP, kUp) = h(kUp, kP);
  h(kP, kR) = two_pi * static_cast<Scalar>(p.omega_B / 2.0);
  h(kR, kP) = h(kP, kR);
  return h;
}

// Dissipator L(rho) in rad/us: spontaneous emission out of |p> at total
// rate Gamma with branching 1/2, 1/6, 1/3 into |down>, |g>, |up>, decay of
// |r> into |g> at rate gamma, and the matching damping of every coherence.
// Accepts any Eigen expression of shape 5x5.
template <typename Derived>
LevelMatrix<typename Eigen::NumTraits<
    typename Derived::Scalar>::Real>
lindblad(const Eigen::MatrixBase<Derived>& rho, const SystemParams& p) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  constexpr Real two_pi = static_cast<Real>(2) * std::numbers::pi_v<Real>;
  const Real big = two_pi * static_cast<Real>(p.gamma_big);
  const Real small = two_pi * static_cast<Real>(p.gamma_small);

  LevelMatrix<Real> out = LevelMatrix<Real>::Zero();
  const auto rho_pp = rho(kP, kP);
  const auto rho_rr = rho(kR, kR);

  // Population flow.
  out(kDown, kDown) = (big / 2) * rho_pp;
  out(kG, kG) = (big / 6) * rho_pp + small * rho_rr;
  out(kUp, kUp) = (big / 3) * rho_pp;
  out(kP, kP) = -big * rho_pp;
  out(kR, kR) = -small * rho_rr;

  // Coherence damping: Gamma/2 for pairs involving |p>, gamma/2 for pairs
  // involving |r>, and (Gamma + gamma)/2 for the p-r coherence.
  for (int i = 0; i < kNumLevels; ++i) {
    for (int j = 0; j < kNumLevels; ++j) {
      if (i == j) continue;
      Real rate = 0;
      if (i == kP || j == kP) rate += big / 2;
      if (i == kR || j == kR) rate += small / 2;
      out(i, j) -= rate * rho(i, j);
    }
  }
  return out;
}

// Full master-equation right-hand side d rho / dt = -i [H, rho] + L(rho).
template <typename Derived>
LevelMatrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
master_rhs(const Eigen::MatrixBase<Derived>& rho, const SystemParams& p,
           double envelope_value = 1.0) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const LevelMatrix<Real> h = hamiltonian<Real>(p, envelope_value);
  const std::complex<Real> min_i(0, -1);
  return (min_i * (h * rho - rho * h) + lindblad(rho, p)).eval();
}

// Integrator step selection. step == 0 picks the default heuristic
// 1 / (160 * f_max) capped at 1e-4 us, where f_max is the largest frequency
// scale in the problem (hyperfine splitting included only when the initial
// state carries |down> coherences). refine enables automatic halving until
// the final Rydberg population moves by less than 1e-8 between halvings;
// more than 12 halvings without settling raises NonConvergence.
struct StepControl {
  double step = 0.0;
  bool refine = false;

  static StepControl fixed(double h) { return {h, false}; }
  static StepControl automatic() { return {0.0, true}; }
};

// Default step heuristic, exposed for tests and diagnostics.
double default_step(const SystemParams& p, bool include_hyperfine);

// Whether rho carries coherences between |down> and any other level, which
// forces the integrator to resolve the hyperfine precession.
bool has_down_coherence(const DensityMatrix& rho);

// Propagates rho0 through one pulse window [0, T] with classical RK4,
// re-symmetrizing rho <- (rho + rho^dagger)/2 after every step. Throws
// InvariantViolation if the trace drifts by more than 1e-6. T == 0 returns
// rho0 unchanged.
DensityMatrix evolve(const DensityMatrix& rho0, const SystemParams& p,
                     const PulseShape& pulse, StepControl ctrl = {});

// Same propagation, returning snapshots of rho at each requested time.
// times must be nondecreasing and lie inside [0, pulse.duration].
std::vector<DensityMatrix> evolve_sampled(const DensityMatrix& rho0,
                                          const SystemParams& p,
                                          const PulseShape& pulse,
                                          std::span<const double> times,
                                          double step = 0.0);

}  // namespace rydsim
