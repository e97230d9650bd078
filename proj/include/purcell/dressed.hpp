#pragma once

#include <Eigen/Dense>
#include <array>

#include "purcell/hilbert.hpp"
#include "purcell/types.hpp"

namespace purcell {

// Pairwise eigenstructure of the undriven qubit-resonator ladder.
struct DressedBasis {
  SystemParams params;
  double n_crit;  // delta^2/(4g^2); +inf when g = 0

  explicit DressedBasis(const SystemParams& p);

  double theta(double n) const;      // mixing angle of the n-excitation pair
  double splitting(double n) const;  // sqrt(delta^2 + 4n g^2), signed like delta
};

// Principal branch of tan(2 theta_n) = 2 g sqrt(n)/delta, theta_n in
// (-pi/4, pi/4], theta_0 = 0; real-valued n is allowed (averaged rates use it).
double mixing_angle(double n, const SystemParams& params);

double critical_photon_number(const SystemParams& params);

enum class DressedLabel { excited, ground };

// excited(n) = cos(theta_{n+1}) |e,n> + sin(theta_{n+1}) |g,n+1>
// ground(n)  = cos(theta_n) |g,n> - sin(theta_n) |e,n-1>
// Eigenvectors of the undriven Hamiltonian with energies +splitting(n+1)/2
// and -splitting(n)/2 (signed).
Eigen::VectorXcd dressed_state(DressedLabel label, int n, const SystemParams& params,
                               const SpaceDescriptor& space);

// Photon-loss induced qubit transitions out of the n-excitation dressed
// states. gamma_E_n vanishes below n = 2 (no |bar-e,n-2> target).
struct JumpRates {
  double n;
  double gamma_R_n;  // relaxation |bar-e,n> -> |bar-g,n>
  double gamma_E_n;  // excitation |bar-g,n> -> |bar-e,n-2>
};

JumpRates jump_rates(double n, const SystemParams& params);

// Exact ladder-dressing unitary D = exp(-Lambda(N_e) I_-), Lambda applied to
// N_e by spectral calculus. D |bare> is the matching dressed state and
// D^dag H D is diagonal away from the truncation edge.
Eigen::MatrixXcd diagonalizing_transform(const SystemParams& params, const SpaceDescriptor& space);

// D^dag a D: exact, or the dispersive operator expansion truncated at the
// given power of lambda (orders 1..7). The expansion is only meaningful for
// |lambda| sqrt(N_max) < 1/2.
Eigen::MatrixXcd transformed_annihilation(const SystemParams& params, const SpaceDescriptor& space);
Eigen::MatrixXcd transformed_annihilation_series(const SystemParams& params,
                                                 const SpaceDescriptor& space, int order);

// Offsets from the resonator frequency of the four steady-spectrum lines,
// {+g^2/Omega_S, -g^2/Omega_S, +Omega_S, -Omega_S} with
// Omega_S = sqrt(delta^2 + 4 n_bar g^2) signed like delta. The first pair is
// the qubit-state-dependent pulled resonator line, the second the Rabi side
// peaks. Degenerate corner g > 0, delta = 0, n_bar = 0 gives infinite pull.
std::array<double, 4> spectral_lines(double n_bar, const SystemParams& params);

}  // namespace purcell
