#pragma once

#include <Eigen/Dense>
#include <vector>

#include "purcell/types.hpp"

namespace purcell {

// Complex eigenenergies of the decaying single-excitation pair.
// E_e is the qubit-like state, E_1 the photon-like one. By construction
// Im(E_e) + Im(E_1) = -kappa/2 exactly and Gamma lies in [0, kappa].
struct ComplexEigenpair {
  complexd E_e;
  complexd E_1;
  double Gamma;  // qubit relaxation rate, -2 Im(E_e)
  double Omega;  // beating frequency, signed like delta
};

// Expansion of alpha|e,0> + beta|g,1> in the non-orthogonal decaying
// eigenbasis, c_e |e~> + c_1 |1~>.
struct SingleExcitationState {
  complexd alpha, beta;
  complexd c_e, c_1;
};

// Generator of d/dt (rho_ee, rho_11, rho_e1^-, rho_e1^+) where
// rho_e1^{+-} = rho_e1 +- rho_1e.
Eigen::Matrix4cd evolution_matrix(const SystemParams& params);

ComplexEigenpair complex_eigenenergies(const SystemParams& params);

enum class PurcellVariant { exact, golden_rule, dispersive, eigenstate_overlap };

double purcell_rate_nodrive(const SystemParams& params, PurcellVariant variant);

// Decompose an arbitrary single-excitation amplitude pair in the decaying
// eigenbasis using the perpendicular-vector construction (plain, not
// conjugated, inner products; the effective 2x2 Hamiltonian is complex
// symmetric).
SingleExcitationState eigenbasis_coefficients(const SystemParams& params, complexd alpha, complexd beta);

enum class NoDriveInitial { bare_e0, eigen_e0 };

// Exact rho_ee(t) (or the eigenstate occupation for eigen_e0) from the matrix
// exponential of the 4x4 generator, plus the matching analytic approximation:
// the dispersive two-term form for bare_e0 and the residual-oscillation form
// for eigen_e0.
struct NoDriveTrace {
  std::vector<double> exact;
  std::vector<double> approximate;
};

NoDriveTrace population_trace_nodrive(const SystemParams& params, NoDriveInitial initial,
                                      const std::vector<double>& t_grid);

}  // namespace purcell
