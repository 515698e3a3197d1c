#include "rydsim/fitting.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rydsim/errors.hpp"

namespace rydsim {
namespace {

constexpr int kMaxIterations = 500;
constexpr double kRelStep = 1e-6;       // central-difference step, relative
constexpr double kStepFloor = 1e-3;     // absolute floor for zero parameters
constexpr double kParamTol = 1e-10;
constexpr double kGradTol = 1e-12;
constexpr double kSingularRatio = 1e-10;

double weighted_rss(const ModelFn& model, std::span<const double> x,
                    std::span<const double> y, const std::vector<double>& w,
                    const Eigen::VectorXd& p) {
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - model(p, x[i])) * w[i];
    rss += r * r;
  }
  return rss;
}

// J_ij = w_i * d model(x_i) / d p_j by central differences.
Eigen::MatrixXd jacobian(const ModelFn& model, std::span<const double> x,
                         const std::vector<double>& w,
                         const Eigen::VectorXd& p) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index np = p.size();
  Eigen::MatrixXd j(n, np);
  Eigen::VectorXd q = p;
  for (Eigen::Index k = 0; k < np; ++k) {
    const double h = kRelStep * (std::abs(p[k]) + kStepFloor);
    q[k] = p[k] + h;
    for (Eigen::Index i = 0; i < n; ++i) j(i, k) = model(q, x[i]);
    q[k] = p[k] - h;
    for (Eigen::Index i = 0; i < n; ++i) {
      j(i, k) = w[i] * (j(i, k) - model(q, x[i])) / (2.0 * h);
    }
    q[k] = p[k];
  }
  return j;
}

void check_rank(const Eigen::MatrixXd& j) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) / sv(0) < kSingularRatio) {
    throw SingularJacobian(
        "Jacobian is rank-deficient: a parameter (or combination) has no "
        "effect on the model");
  }
}

}  // namespace

FitResult least_squares(const ModelFn& model, std::span<const double> x,
                        std::span<const double> y,
                        std::span<const double> sigma,
                        const Eigen::VectorXd& p0) {
  const std::size_t n = x.size();
  const auto np = p0.size();
  if (y.size() != n) throw std::invalid_argument("x and y lengths differ");
  if (!sigma.empty() && sigma.size() != n) {
    throw std::invalid_argument("sigma length differs from x");
  }
  if (static_cast<Eigen::Index>(n) < np) {
    throw std::invalid_argument("fewer points than parameters");
  }
  if (!p0.allFinite()) throw std::invalid_argument("p0 must be finite");

  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      throw std::invalid_argument("sigma values must be > 0");
    }
    w[i] = 1.0 / sigma[i];
  }

  FitResult out;
  out.params = p0;
  out.rss = weighted_rss(model, x, y, w, out.params);

  double lambda = 1e-3;
  Eigen::VectorXd r(n);
  while (out.iterations < kMaxIterations) {
    for (std::size_t i = 0; i < n; ++i) {
      r[static_cast<Eigen::Index>(i)] =
          (y[i] - model(out.params, x[i])) * w[i];
    }
    const Eigen::MatrixXd j = jacobian(model, x, w, out.params);
    check_rank(j);

    const Eigen::VectorXd grad = j.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() < kGradTol) {
      out.converged = true;
      break;
    }

    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::VectorXd delta = damped.ldlt().solve(grad);

    ++out.iterations;
    const Eigen::VectorXd trial = out.params + delta;
    const double trial_rss = weighted_rss(model, x, y, w, trial);
    if (trial_rss <= out.rss) {
      const double rel_change =
          delta.norm() / (out.params.norm() + kStepFloor);
      out.params = trial;
      out.rss = trial_rss;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (rel_change < kParamTol) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) break;  // fully damped, no progress possible
    }
  }

  // Covariance from the scaled normal matrix at the solution.
  const Eigen::MatrixXd j = jacobian(model, x, w, out.params);
  check_rank(j);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  const double dof = static_cast<double>(n) - static_cast<double>(np);
  const double s2 = dof > 0 ? out.rss / dof : 0.0;
  const Eigen::MatrixXd cov =
      jtj.ldlt().solve(Eigen::MatrixXd::Identity(np, np)) * s2;
  out.std_errors.resize(np);
  for (Eigen::Index k = 0; k < np; ++k) {
    out.std_errors[k] = std::sqrt(std::max(0.0, cov(k, k)));
  }
  return out;
}

namespace {

// Runs least_squares with selected parameters replaced by their logarithm
// internally, which enforces positivity. Reported parameters and standard
// errors are mapped back to natural units (SE_p = SE_log * p).
FitResult fit_log_reparam(const ModelFn& natural_model,
                          std::span<const double> x, std::span<const double> y,
                          const Eigen::VectorXd& p0,
                          const std::vector<bool>& is_log) {
  Eigen::VectorXd q0 = p0;
  for (Eigen::Index k = 0; k < p0.size(); ++k) {
    if (is_log[static_cast<std::size_t>(k)]) {
      if (!(p0[k] > 0.0)) {
        throw std::invalid_argument("log-reparameterized seed must be > 0");
      }
      q0[k] = std::log(p0[k]);
    }
  }
  auto decode = [&is_log](const Eigen::VectorXd& q) {
    Eigen::VectorXd p = q;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      if (is_log[static_cast<std::size_t>(k)]) p[k] = std::exp(q[k]);
    }
    return p;
  };
  const ModelFn wrapped = [&natural_model, decode](const Eigen::VectorXd& q,
                                                   double xv) {
    return natural_model(decode(q), xv);
  };

  FitResult fit = least_squares(wrapped, x, y, {}, q0);
  const Eigen::VectorXd p = decode(fit.params);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (is_log[static_cast<std::size_t>(k)]) {
      fit.std_errors[k] *= p[k];
    }
  }
  fit.params = p;
  return fit;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  return v[mid];
}

}  // namespace

FitResult fit_damped_cosine(std::span<const double> t_us,
                            std::span<const double> y) {
  if (t_us.size() < 8) {
    throw std::invalid_argument("damped-cosine fit needs at least 8 points");
  }
  const double y_min = *std::min_element(y.begin(), y.end());
  const double y_max = *std::max_element(y.begin(), y.end());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  if (y_max - y_min < 1e-12 * std::max(1.0, std::abs(y_max))) {
    throw NoOscillation("data are constant; no oscillation to fit");
  }

  // Seed the frequency from a discrete Fourier magnitude scan: LM's basin
  // around the oscillation frequency is only about one period wide.
  constexpr double kNuLo = 0.5, kNuHi = 30.0, kNuStep = 0.05;  // MHz
  double best_nu = kNuLo, best_mag = -1.0;
  std::vector<double> mags;
  for (double nu = kNuLo; nu <= kNuHi + 1e-9; nu += kNuStep) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < t_us.size(); ++i) {
      const double phase = 2.0 * std::numbers::pi * nu * t_us[i];
      re += (y[i] - mean) * std::cos(phase);
      im += (y[i] - mean) * std::sin(phase);
    }
    const double mag = std::hypot(re, im);
    mags.push_back(mag);
    if (mag > best_mag) {
      best_mag = mag;
      best_nu = nu;
    }
  }
  if (best_mag < 3.0 * median(mags)) {
    throw NoOscillation(
        "no spectral peak above 3x the median Fourier magnitude");
  }

  const double span =
      *std::max_element(t_us.begin(), t_us.end()) -
      *std::min_element(t_us.begin(), t_us.end());
  Eigen::VectorXd p0(4);
  p0 << mean, (y_max - y_min) / 2.0, span / 2.0, best_nu;
  const ModelFn model = [](const Eigen::VectorXd& p, double t) {
    return p[0] - p[1] * std::exp(-t / p[2]) *
                      std::cos(2.0 * std::numbers::pi * p[3] * t);
  };
  return fit_log_reparam(model, t_us, y, p0, {false, false, true, false});
}

FitResult fit_gaussian_dips(std::span<const double> x_mhz,
                            std::span<const double> y, int n_dips) {
  if (n_dips != 1 && n_dips != 2) {
    throw std::invalid_argument("n_dips must be 1 or 2");
  }
  const std::size_t n = x_mhz.size();
  if (n < static_cast<std::size_t>(5 * n_dips + 1)) {
    throw std::invalid_argument("too few points for the requested dip count");
  }

  const double a0 = *std::max_element(y.begin(), y.end());
  std::vector<double> depth(n);
  for (std::size_t i = 0; i < n; ++i) depth[i] = a0 - y[i];

  double grid_step = std::abs(x_mhz[1] - x_mhz[0]);
  if (grid_step == 0.0) grid_step = 1.0;

  // Width seed: half-depth crossing distance around a dip candidate.
  auto width_seed = [&](std::size_t idx) {
    const double half = depth[idx] / 2.0;
    std::size_t l = idx, r = idx;
    while (l > 0 && depth[l] > half) --l;
    while (r + 1 < n && depth[r] > half) ++r;
    const double fwhm = std::abs(x_mhz[r] - x_mhz[l]);
    const double s = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    return std::max(s, grid_step);
  };

  const std::size_t main_idx = static_cast<std::size_t>(
      std::max_element(depth.begin(), depth.end()) - depth.begin());

  Eigen::VectorXd p0(1 + 3 * n_dips);
  p0[0] = a0;
  p0[1] = depth[main_idx];
  p0[2] = x_mhz[main_idx];
  p0[3] = width_seed(main_idx);
  std::vector<bool> is_log = {false, false, false, true};

  if (n_dips == 2) {
    // Second seed: deepest point at least one main-dip FWHM away, so both
    // Gaussians start in distinct basins.
    const double exclusion = gaussian_fwhm(p0[3]);
    std::size_t second_idx = main_idx;
    double second_depth = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(x_mhz[i] - x_mhz[main_idx]) < exclusion) continue;
      if (depth[i] > second_depth) {
        second_depth = depth[i];
        second_idx = i;
      }
    }
    if (second_idx == main_idx) {
      // Nothing outside the exclusion zone: offset the seed by one FWHM.
      p0[4] = p0[1] / 2.0;
      p0[5] = p0[2] + gaussian_fwhm(p0[3]);
      p0[6] = p0[3];
    } else {
      p0[4] = std::max(second_depth, p0[1] * 1e-3);
      p0[5] = x_mhz[second_idx];
      p0[6] = width_seed(second_idx);
    }
    is_log.insert(is_log.end(), {false, false, true});
  }

  const int dips = n_dips;
  const ModelFn model = [dips](const Eigen::VectorXd& p, double x) {
    double v = p[0];
    for (int d = 0; d < dips; ++d) {
      const double b = p[1 + 3 * d];
      const double nu = p[2 + 3 * d];
      const double s = p[3 + 3 * d];
      const double z = (x - nu) / s;
      v -= b * std::exp(-0.5 * z * z);
    }
    return v;
  };
  return fit_log_reparam(model, x_mhz, y, p0, is_log);
}

FitResult fit_exp_decay(std::span<const double> t_ms,
                        std::span<const double> y) {
  if (t_ms.size() < 4) {
    throw std::invalid_argument("exponential fit needs at least 4 points");
  }
  const double y_min = *std::min_element(y.begin(), y.end());
  const double y_max = *std::max_element(y.begin(), y.end());
  const double span =
      *std::max_element(t_ms.begin(), t_ms.end()) -
      *std::min_element(t_ms.begin(), t_ms.end());
  if (!(span > 0.0)) {
    throw std::invalid_argument("time values must span a nonzero range");
  }

  Eigen::VectorXd p0(3);
  p0 << y_min, y_max - y_min, span / 3.0;
  const ModelFn model = [](const Eigen::VectorXd& p, double t) {
    return p[0] + p[1] * std::exp(-t / p[2]);
  };
  return fit_log_reparam(model, t_ms, y, p0, {false, false, true});
}

FitResult fit_beam_waist(std::span<const double> x_um,
                         std::span<const double> rate) {
  const std::size_t n = x_um.size();
  if (n < 5) {
    throw std::invalid_argument("beam-waist fit needs at least 5 positions");
  }
  const double r_min = *std::min_element(rate.begin(), rate.end());
  const std::size_t peak_idx = static_cast<std::size_t>(
      std::max_element(rate.begin(), rate.end()) - rate.begin());
  const double span =
      *std::max_element(x_um.begin(), x_um.end()) -
      *std::min_element(x_um.begin(), x_um.end());

  // Second-moment width of the background-subtracted profile; for a clean
  // Gaussian beam profile sigma_x = w/2.
  double norm = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    norm += rate[i] - r_min;
    m1 += (rate[i] - r_min) * x_um[i];
  }
  double w0 = span / 2.0;
  double x0 = x_um[peak_idx];
  if (norm > 0.0) {
    const double centroid = m1 / norm;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m2 += (rate[i] - r_min) * (x_um[i] - centroid) * (x_um[i] - centroid);
    }
    const double sigma = std::sqrt(m2 / norm);
    if (sigma > 0.0) w0 = 2.0 * sigma;
    x0 = centroid;
  }

  Eigen::VectorXd p0(3);
  p0 << rate[peak_idx], x0, w0;
  const ModelFn model = [](const Eigen::VectorXd& p, double x) {
    const double z = (x - p[1]) / p[2];
    return p[0] * std::exp(-2.0 * z * z);
  };
  return fit_log_reparam(model, x_um, rate, p0, {false, false, true});
}

}  // namespace rydsim
