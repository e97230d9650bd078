#pragma once

#include <stdexcept>
#include <string>

namespace purcell {

// Fock cutoff too small for the requested object or state.
struct truncation_error : std::runtime_error {
  explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested configuration is deliberately outside the model (e.g. a detuned
// drive in the Hamiltonian builder).
struct unsupported_configuration : std::runtime_error {
  explicit unsupported_configuration(const std::string& what) : std::runtime_error(what) {}
};

// Parameters hit a pole of a formula (e.g. anharmonicity equal to detuning).
struct singular_configuration : std::runtime_error {
  explicit singular_configuration(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive integrator could not reach the requested tolerance, or the evolved
// state violated a density-matrix invariant well beyond tolerance.
struct integration_failure : std::runtime_error {
  explicit integration_failure(const std::string& what) : std::runtime_error(what) {}
};

// Rate fit rejected: window collapsed or the residual was not exponential.
struct fit_error : std::runtime_error {
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

// Self-consistency equation has no real root for the given drive.
struct root_error : std::runtime_error {
  explicit root_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace purcell
