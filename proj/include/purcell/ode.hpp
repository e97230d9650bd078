#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "purcell/errors.hpp"

namespace purcell {

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  // Called after every accepted step; may adjust y slightly (e.g. re-Hermitize
  // a density matrix).  The adjustment must stay within the local error
  // budget: the FSAL derivative is reused across it.
  std::function<void(double, Eigen::VectorXcd&)> post_step;
};

// Dormand-Prince 5(4) pair with FSAL and a PI step controller.  Integrates
// y' = rhs(t, y) in place from t0 to t1 >= t0.  Throws integration_failure
// when the controller underflows the step size (typically a NaN in the
// right-hand side).
inline void integrate_dopri5(
    const std::function<Eigen::VectorXcd(double, const Eigen::VectorXcd&)>& rhs,
    double t0, double t1, Eigen::VectorXcd& y, const OdeOptions& opt = {}) {
  if (!(t1 >= t0)) throw std::invalid_argument("integrate_dopri5: t1 < t0");
  if (t1 == t0) return;
  const double span = t1 - t0;

  constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  // b - b_hat, the embedded 4th-order error weights
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  double t = t0;
  Eigen::VectorXcd k1 = rhs(t, y);

  double h;
  {
    // crude first step from the scaled state/derivative ratio
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 > 1e-300 && d1 > 1e-300) ? 0.01 * d0 / d1 : 1e-3 * span;
    h = std::min(h, span);
  }

  const double h_min = 1e-14 * span;
  double err_prev = 1.0;
  bool just_rejected = false;
  while (t < t1) {
    h = std::min(h, t1 - t);
    if (h < h_min) throw integration_failure("integrate_dopri5: step size underflow");

    const Eigen::VectorXcd k2 = rhs(t + c2 * h, y + (h * a21) * k1);
    const Eigen::VectorXcd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXcd k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXcd k5 =
        rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXcd k6 =
        rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXcd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXcd k7 = rhs(t + h, y5);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double e = std::abs(h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                     e6 * k6[i] + e7 * k7[i]));
      const double sc =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / double(y.size()));

    if (!std::isfinite(err)) {  // NaN in a stage: retreat hard
      h *= 0.25;
      just_rejected = true;
      continue;
    }
    if (err <= 1.0) {
      t += h;
      y.swap(y5);
      if (opt.post_step) opt.post_step(t, y);
      k1.swap(k7);  // FSAL
      const double e_clip = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e_clip, -0.17) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, just_rejected ? 1.0 : 5.0);
      h *= fac;
      err_prev = e_clip;
      just_rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      just_rejected = true;
    }
  }
}

}  // namespace purcell
