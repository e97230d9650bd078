#pragma once

#include <complex>

namespace purcell {

using complexd = std::complex<double>;

inline constexpr double pi = 3.1415926535897932384626433832795;
inline constexpr double two_pi = 2.0 * pi;

// Rotating-frame parameters of the driven qubit-resonator system.
// Frequencies and rates share one unit (rad/s and 1/s respectively); all
// formulas are homogeneous, so any consistent unit works.
struct SystemParams {
  double g = 0.0;              // qubit-resonator coupling
  double kappa = 0.0;          // resonator energy decay rate
  double delta = 0.0;          // omega_q - omega_r
  double epsilon = 0.0;        // drive amplitude
  double delta_rd = 0.0;       // omega_r - omega_d; classical formulas only
  double anharmonicity = 0.0;  // three-level |A|; 0 means two-level model

  // lambda = g/delta, the dispersive expansion parameter (signed).
  double lambda() const { return g / delta; }
};

inline double sgn_or_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace purcell
