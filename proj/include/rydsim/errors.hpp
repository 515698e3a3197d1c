#pragma once

#include <stdexcept>
#include <string>

namespace rydsim {

// Base class for failures raised while integrating or post-processing a
// simulated experiment.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Automatic step refinement did not stabilize the final Rydberg population
// within the allowed number of halvings.
struct NonConvergence : SimulationError {
  using SimulationError::SimulationError;
};

// A conserved quantity (the density-matrix trace) drifted beyond tolerance
// during integration, typically because a user-supplied step is too coarse.
struct InvariantViolation : SimulationError {
  using SimulationError::SimulationError;
};

// Resonance search found no usable excitation dip in its scan window.
struct NoResonance : SimulationError {
  using SimulationError::SimulationError;
};

// Base class for least-squares fitting failures.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The Jacobian lost rank during optimization, so the parameter update is
// underdetermined.
struct SingularJacobian : FitError {
  using FitError::FitError;
};

// Oscillation fit could not locate a spectral peak to seed the frequency.
struct NoOscillation : FitError {
  using FitError::FitError;
};

// A closed-form expression was evaluated outside its domain (for example a
// vanishing denominator).
struct DivisionDomain : std::domain_error {
  using std::domain_error::domain_error;
};

// Configuration file could not be parsed; carries the 1-based line number.
struct ConfigError : std::runtime_error {
  ConfigError(int line_number, const std::string& message)
      : std::runtime_error("config line " + std::to_string(line_number) +
                           ": " + message),
        line(line_number) {}
  int line;
};

}  // namespace rydsim
