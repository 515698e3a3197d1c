#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <span>

namespace rydsim {

// y = model(params, x).
using ModelFn = std::function<double(const Eigen::VectorXd&, double)>;

struct FitResult {
  Eigen::VectorXd params;
  Eigen::VectorXd std_errors;  ///< per-parameter, from the scaled covariance
  double rss = 0.0;            ///< residual sum of squares (weighted if sigma given)
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt least squares with a central-difference Jacobian
// (relative step 1e-6). Converges on relative parameter change < 1e-10 or
// gradient infinity-norm < 1e-12; stops after 500 iterations with
// converged = false. sigma, when non-empty, gives per-point standard
// deviations used as inverse weights. Standard errors come from
// s^2 (J^T W J)^-1 with s^2 = RSS / (N - P).
// Throws SingularJacobian when the Jacobian loses rank (relative singular
// value below 1e-10), std::invalid_argument on malformed inputs.
FitResult least_squares(const ModelFn& model, std::span<const double> x,
                        std::span<const double> y,
                        std::span<const double> sigma,
                        const Eigen::VectorXd& p0);

// y = A - B exp(-t/tau) cos(2 pi nu t), t in us. Parameters and standard
// errors are reported as (A, B, tau_us, nu_MHz); tau is fitted as a log
// parameter to stay positive. The frequency seed comes from a discrete
// Fourier magnitude scan over [0.5, 30] MHz. Throws NoOscillation when the
// data are flat or the spectral peak is below 3x the median magnitude.
FitResult fit_damped_cosine(std::span<const double> t_us,
                            std::span<const double> y);

// y = A - sum_i B_i exp(-(x - nu_i)^2 / (2 s_i^2)), n_dips 1 or 2.
// Parameter layout: (A, B_1, nu_1, s_1[, B_2, nu_2, s_2]); widths fitted as
// log parameters.
FitResult fit_gaussian_dips(std::span<const double> x_mhz,
                            std::span<const double> y, int n_dips);

// y = y_bg + A exp(-t/tau), t in ms; parameters (y_bg, A, tau_ms), tau
// fitted as a log parameter.
FitResult fit_exp_decay(std::span<const double> t_ms,
                        std::span<const double> y);

// rate(x) = rate0 exp(-2 (x - x0)^2 / w^2) with w the 1/e^2 waist;
// parameters (rate0, x0, w), w fitted as a log parameter.
FitResult fit_beam_waist(std::span<const double> x_um,
                         std::span<const double> rate);

// FWHM of a Gaussian with standard deviation s.
inline double gaussian_fwhm(double s) {
  return 2.0 * std::sqrt(2.0 * std::log(2.0)) * s;
}

}  // namespace rydsim
