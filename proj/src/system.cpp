#include "rydsim/system.hpp"

#include <algorithm>
#include <stdexcept>

namespace rydsim {

void SystemParams::validate() const {
  if (omega_R < 0) throw std::invalid_argument("omega_R must be >= 0");
  if (omega_B < 0) throw std::invalid_argument("omega_B must be >= 0");
  if (gamma_big < 0) throw std::invalid_argument("gamma_big must be >= 0");
  if (gamma_small < 0) throw std::invalid_argument("gamma_small must be >= 0");
  if (omega_hf < 0) throw std::invalid_argument("omega_hf must be >= 0");
}

double PulseShape::value(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  if (envelope == Envelope::kRectangle) return 1.0;
  const double ramp = std::min(rise_time, 0.5 * duration);
  if (ramp <= 0.0) return 1.0;
  if (t < ramp) return t / ramp;
  if (t > duration - ramp) return (duration - t) / ramp;
  return 1.0;
}

void PulseShape::validate() const {
  if (duration < 0) throw std::invalid_argument("duration must be >= 0");
  if (rise_time < 0) throw std::invalid_argument("rise_time must be >= 0");
}

}  // namespace rydsim
