#pragma once

#include <Eigen/Dense>

#include "purcell/types.hpp"

namespace purcell {

// Composite space: two-level qubit times truncated Fock space.
// Basis ordering is fixed project-wide as (qubit slow, Fock fast):
// index = qubit * (fock_cutoff + 1) + n, qubit 0 = |g>, 1 = |e>.
struct SpaceDescriptor {
  int fock_cutoff = 0;  // highest retained Fock level N_max

  int fock_dim() const { return fock_cutoff + 1; }
  int dim() const { return 2 * fock_dim(); }
  int index(int qubit, int n) const { return qubit * fock_dim() + n; }
};

// Throws std::invalid_argument for a negative cutoff.
SpaceDescriptor make_space(int fock_cutoff);

// Default cutoff policy: N_max = ceil(n_bar + 10 sqrt(n_bar + 1) + 15).
// Keeps the coherent-state tail population below ~1e-8 for n_bar up to ~40.
int default_cutoff(double n_bar_target);

enum class Op {
  annihilation,
  creation,
  number,
  sigma_plus,   // |e><g|
  sigma_minus,  // |g><e|
  sigma_z,      // |e><e| - |g><g|
  total_excitations,  // N_e = a^dag a + |e><e|
  identity,
};

Eigen::MatrixXcd elementary_operator(Op kind, const SpaceDescriptor& space);

// H = (delta/2) sigma_z + g (a^dag sigma_- + a sigma_+) + epsilon (a + a^dag),
// valid for a drive resonant with the resonator. A nonzero delta_rd throws
// unsupported_configuration (detuned drive enters only the classical
// steady-state formula, not the simulated Hamiltonian).
Eigen::MatrixXcd hamiltonian_rotating(const SystemParams& params, const SpaceDescriptor& space);

// D(alpha) = exp(alpha a^dag - conj(alpha) a), identity on the qubit factor.
// Throws truncation_error when |alpha|^2 > fock_cutoff / 4.
Eigen::MatrixXcd displacement(complexd alpha, const SpaceDescriptor& space);

}  // namespace purcell
