#pragma once

namespace rydsim {

// Basis ordering for every 5x5 matrix in this library:
//   {|down>, |g>, |up>, |p>, |r>}
// |down> and |up> are the qubit states in the 5S_1/2 ground manifold,
// |g> collects the remaining ground sublevels reachable by spontaneous
// emission, |p> is the 5P_1/2 intermediate state and |r> the Rydberg
// state. Do not reorder: the builders in master_equation.hpp index with
// these constants.
enum Level : int { kDown = 0, kG = 1, kUp = 2, kP = 3, kR = 4 };

inline constexpr int kNumLevels = 5;

inline constexpr const char* level_name(Level l) {
  constexpr const char* names[kNumLevels] = {"down", "g", "up", "p", "r"};
  return names[static_cast<int>(l)];
}

}  // namespace rydsim
