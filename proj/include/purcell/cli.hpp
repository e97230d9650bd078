#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "purcell/lindblad.hpp"

namespace purcell {

// One simulated sweep point: size the drive for n_bar_target, evolve from the
// matching dressed coherent state, fit the requested ladder rate over the
// standard window, then deconvolve the finite-window bias against the
// two-rate model evaluated at the measured photon number.
struct SimSpec {
  double delta_over_g = 10.0;
  double kappa_over_g = 1.0;
  double n_bar_target = 0.0;  // 0 runs without drive
  FitMode mode = FitMode::relaxation;
  double g = two_pi * 50e6;  // rad/s
  int cutoff = -1;           // -1: default policy (plus offset)
  int cutoff_offset = 0;     // escalation applied on top of the policy value
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  bool check_positivity = false;
};

struct SimResult {
  SimSpec spec;
  double n_bar_measured = 0.0;
  double rate = 0.0;  // window-deconvolved, 1/s
  double rate_over_gamma_P = 0.0;
  double raw_rate = 0.0;  // least-squares slope before deconvolution
  double r_squared = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  int cutoff = 0;
  int samples = 0;
  double wall_seconds = 0.0;
  std::string status = "ok";  // ok | fit_rejected | error:<kind>
};

SimResult run_sim_point(const SimSpec& spec);

// Closed-form wall-time prediction for the same point, calibrated on this
// integrator; feeds the runtime budget guard.
double estimate_sim_seconds(const SimSpec& spec);

// kappa-scaling protocol: the small-kappa leg runs first at n_bar_target, the
// large-kappa leg then targets the photon number the first leg measured, with
// one refinement pass when the two measurements still disagree by more than
// 0.3%. Both legs share the generous cutoff default_cutoff(1.5 target).
struct MatchedPair {
  SimResult lo;
  SimResult hi;
  double ratio = 0.0;  // (rate/gamma_P)_lo / (rate/gamma_P)_hi
  bool refined = false;
};

MatchedPair run_matched_pair(double delta_over_g, double n_bar_target, double g,
                             double kappa_lo_over_g = 0.1, double kappa_hi_over_g = 1.0);

// Entry point behind the purcell binary; args excludes the program name.
// Returns the process exit code: 0 success, 1 runtime failure, 2 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace purcell
