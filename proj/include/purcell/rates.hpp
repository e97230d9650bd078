#pragma once

#include <functional>
#include <string>
#include <vector>

#include "purcell/types.hpp"

namespace purcell {

// Relaxation/excitation rate pair at a given mean photon number, tagged with
// the method that produced it: "averaged_closed_form", "real_n_closed_form",
// "series(k)", or "approximation(name)".
struct RateSet {
  double gamma_R = 0.0;
  double gamma_E = 0.0;
  double n_bar = 0.0;
  std::string method;
};

// Classical resonator amplitudes conditioned on the qubit state.
// series_warning is set when lambda^2 (2 n_bar + 1) >= 1 for either ladder,
// i.e. outside the validity range of the underlying expansion.
struct FieldAmplitudes {
  complexd alpha_e{0.0, 0.0};
  complexd alpha_g{0.0, 0.0};
  double n_bar_e = 0.0;  // |alpha_e|^2
  double n_bar_g = 0.0;  // |alpha_g|^2
  bool series_warning = false;
};

struct ClassicalTrajectory {
  std::vector<double> t;
  std::vector<FieldAmplitudes> amplitudes;
  bool series_warning = false;  // any point (including the initial one) out of range
};

struct EffectiveDetuning {
  double delta_eff = 0.0;
  double n_crit_tilde = 0.0;
};

// Poisson-weighted mean of f over photon number, sum_n P(n) f(n) / sum_n P(n)
// with P(n) = e^{-n_bar} n_bar^n / n!.  The sum stops once the cumulative
// weight exceeds 1 - 1e-12 (hard cap n <= n_bar + 12 sqrt(n_bar+1) + 20).
double poisson_average(const std::function<double(int)>& f, double n_bar);

// Photon-number average of the dressed-ladder jump rates.
RateSet averaged_rates(double n_bar, const SystemParams& params);

// Jump rates evaluated directly at real n = n_bar (no averaging); the
// dashed-curve companion of averaged_rates.
RateSet real_n_rates(double n_bar, const SystemParams& params);

enum class RateKind { relax, excite };

// Perturbative series for the averaged rates.  order counts the highest power
// of lambda kept in the rate: relax supports 2, 4, 6, 8 and excite 6, 8, 10.
double rate_series(RateKind kind, double n_bar, const SystemParams& params, int order);

enum class RateApproximation {
  relax_leading,
  relax_large_nbar,
  relax_strong_suppression,
  excite_leading,
  excite_strong_suppression,
  excite_large_nbar,
};

// Closed-form asymptotic approximations; each form's validity regime is the
// caller's business.
double rate_approximation(RateApproximation name, double n_bar, const SystemParams& params);

// All nonnegative real roots n_bar of the self-consistency relation
//   n_bar [ (g^2/sqrt(delta^2 + 4 g^2 n_bar) + delta_rd)^2 + kappa^2/4 ] = epsilon^2,
// sorted ascending.  One root when the drive sits at the resonator frequency;
// up to three on the bistable fold for delta_rd != 0.
std::vector<double> steady_photon_number(const SystemParams& params);

// Closed-form inverse: the drive amplitude that makes n_bar_target a root.
double drive_for_photon_number(double n_bar_target, const SystemParams& params);

// Integrates the classical field equations for (alpha_e, alpha_g) over t_grid;
// initial amplitudes apply at t_grid.front().  The equations are autonomous in
// the drive frame, with the kappa, chi = g^2/delta and drive coefficients
// carrying their lambda^2 ladder corrections.
ClassicalTrajectory classical_field_dynamics(const SystemParams& params,
                                             const std::vector<double>& t_grid,
                                             const FieldAmplitudes& initial = {});

// Steady state of the classical field equations (root of alpha_dot = 0 per
// ladder).  Under bistable conditions this returns one root of the
// self-consistency map, not a branch selection.
FieldAmplitudes steady_state(const SystemParams& params);

// Three-level (transmon-like) effective detuning at photon number n:
//   delta_eff = delta (1 + n / (2 n_crit_tilde)),
//   n_crit_tilde = (delta^2 / 4 g^2) (A - delta) / A,
// with A the anharmonicity from params.
EffectiveDetuning effective_detuning_three_level(double n, const SystemParams& params);

}  // namespace purcell
