#include "purcell/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "purcell/dressed.hpp"
#include "purcell/errors.hpp"
#include "purcell/ode.hpp"

namespace purcell {

namespace {

// left side of the self-consistency relation, written so that every term is
// finite at n = 0 even for delta = 0 (the naive pull g^2/u diverges there)
double consistency_lhs(double n, const SystemParams& p) {
  const double g2 = p.g * p.g;
  const double u2 = p.delta * p.delta + 4.0 * g2 * n;
  const double flat = p.delta_rd * p.delta_rd + 0.25 * p.kappa * p.kappa;
  if (g2 == 0.0 || u2 == 0.0) return n * flat;
  return n * g2 * g2 / u2 + 2.0 * n * g2 * p.delta_rd / std::sqrt(u2) + n * flat;
}

double consistency_dlhs(double n, const SystemParams& p) {
  const double g2 = p.g * p.g;
  const double u2 = p.delta * p.delta + 4.0 * g2 * n;
  const double flat = p.delta_rd * p.delta_rd + 0.25 * p.kappa * p.kappa;
  if (g2 == 0.0 || u2 == 0.0) return flat;
  const double u = std::sqrt(u2);
  return g2 * g2 / u2 - 4.0 * g2 * g2 * g2 * n / (u2 * u2) +
         2.0 * g2 * p.delta_rd / u * (1.0 - 2.0 * g2 * n / u2) + flat;
}

// safeguarded Newton for consistency_lhs(n) = eps^2 on a sign-changing bracket
double newton_root(double lo, double hi, double seed, const SystemParams& p) {
  const double target = p.epsilon * p.epsilon;
  double n = std::clamp(seed, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = consistency_lhs(n, p) - target;
    if (f < 0.0)
      lo = n;
    else
      hi = n;
    const double df = consistency_dlhs(n, p);
    double next = (df != 0.0) ? n - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - n) <= 1e-15 * (1.0 + std::abs(n))) return next;
    n = next;
  }
  return n;
}

// classical field equation coefficients for one ladder; s = +1 for the qubit
// excited ladder, -1 for the ground one.  alpha_dot = (-kappa_eff/2 + i B) a
// - i eps_eff, all three carrying their lambda^2 corrections.
struct LadderCoeffs {
  double kappa_eff;  // kappa * A
  double pull;       // B
  double drive;      // C (multiplies epsilon)
};

LadderCoeffs ladder_coeffs(double n, double s, const SystemParams& p) {
  const double lam = p.lambda();
  const double l2 = lam * lam;
  const double chi = p.g * p.g / p.delta;
  LadderCoeffs c;
  c.kappa_eff = p.kappa * (1.0 + s * l2 * (1.0 - 6.0 * l2 * n));
  c.pull = chi * (l2 - s * (1.0 - 2.0 * l2 * (n + 1.0))) - p.delta_rd;
  c.drive = 1.0 - l2 * l2 / 8.0 + s * (l2 / 2.0) * (1.0 - 3.0 * l2 * (2.0 * n + 1.0));
  return c;
}

FieldAmplitudes pack_amplitudes(complexd ae, complexd ag, double l2) {
  FieldAmplitudes f;
  f.alpha_e = ae;
  f.alpha_g = ag;
  f.n_bar_e = std::norm(ae);
  f.n_bar_g = std::norm(ag);
  f.series_warning = l2 * (2.0 * f.n_bar_e + 1.0) >= 1.0 ||
                     l2 * (2.0 * f.n_bar_g + 1.0) >= 1.0;
  return f;
}

}  // namespace

double poisson_average(const std::function<double(int)>& f, double n_bar) {
  if (!(n_bar >= 0.0)) throw std::invalid_argument("poisson_average: n_bar must be >= 0");
  if (n_bar == 0.0) return f(0);
  const int cap = int(n_bar + 12.0 * std::sqrt(n_bar + 1.0) + 20.0);
  const double log_nbar = std::log(n_bar);
  double logw = -n_bar;  // log P(0)
  double acc = 0.0;
  double total = 0.0;
  for (int n = 0; n <= cap; ++n) {
    const double w = std::exp(logw);
    acc += w * f(n);
    total += w;
    if (total > 1.0 - 1e-12) break;
    logw += log_nbar - std::log(double(n) + 1.0);
  }
  return acc / total;
}

RateSet averaged_rates(double n_bar, const SystemParams& params) {
  RateSet out;
  out.n_bar = n_bar;
  out.method = "averaged_closed_form";
  out.gamma_R = poisson_average(
      [&](int n) { return jump_rates(double(n), params).gamma_R_n; }, n_bar);
  out.gamma_E = poisson_average(
      [&](int n) { return jump_rates(double(n), params).gamma_E_n; }, n_bar);
  return out;
}

RateSet real_n_rates(double n_bar, const SystemParams& params) {
  if (!(n_bar >= 0.0)) throw std::invalid_argument("real_n_rates: n_bar must be >= 0");
  const JumpRates r = jump_rates(n_bar, params);
  RateSet out;
  out.n_bar = n_bar;
  out.method = "real_n_closed_form";
  out.gamma_R = r.gamma_R_n;
  out.gamma_E = r.gamma_E_n;
  return out;
}

double rate_series(RateKind kind, double n_bar, const SystemParams& params, int order) {
  const double lam = params.lambda();
  const double l2 = lam * lam;
  const double nb = n_bar;
  if (kind == RateKind::relax) {
    // kappa lambda^2 [1 - (6 nb + 3) l2 + (31 nb^2 + 62 nb + 10) l2^2 - ...]
    double br = 0.0;
    switch (order) {
      case 8:
        br -= (150.0 * nb * nb * nb + 675.0 * nb * nb + 520.0 * nb + 35.0) * l2 * l2 * l2;
        [[fallthrough]];
      case 6:
        br += (31.0 * nb * nb + 62.0 * nb + 10.0) * l2 * l2;
        [[fallthrough]];
      case 4:
        br -= (6.0 * nb + 3.0) * l2;
        [[fallthrough]];
      case 2:
        br += 1.0;
        break;
      default:
        throw std::invalid_argument("rate_series: relax order must be 2, 4, 6 or 8");
    }
    return params.kappa * l2 * br;
  }
  // kappa lambda^6 [nb^2 - (10 nb^3 + 15 nb^2) l2 + (69 nb^4 + 276 nb^3 + 159 nb^2) l2^2]
  double br = 0.0;
  switch (order) {
    case 10:
      br += (69.0 * nb * nb * nb * nb + 276.0 * nb * nb * nb + 159.0 * nb * nb) * l2 * l2;
      [[fallthrough]];
    case 8:
      br -= (10.0 * nb * nb * nb + 15.0 * nb * nb) * l2;
      [[fallthrough]];
    case 6:
      br += nb * nb;
      break;
    default:
      throw std::invalid_argument("rate_series: excite order must be 6, 8 or 10");
  }
  return params.kappa * l2 * l2 * l2 * br;
}

double rate_approximation(RateApproximation name, double n_bar, const SystemParams& params) {
  const double lam = params.lambda();
  const double gd = params.kappa * lam * lam;  // dispersive-limit rate
  const double nc = critical_photon_number(params);
  const double x = n_bar / nc;
  const double y = nc / n_bar;
  switch (name) {
    case RateApproximation::relax_leading:
      return gd * (1.0 - 1.5 * x);
    case RateApproximation::relax_large_nbar: {
      const double br = 1.0 / (1.0 + x) + 1.0 / std::sqrt(1.0 + x);
      return 0.25 * gd * br * br;
    }
    case RateApproximation::relax_strong_suppression:
      return gd * 0.25 * y * (1.0 + 2.0 * std::sqrt(y));
    case RateApproximation::excite_leading:
      return gd / 16.0 * x * x;
    case RateApproximation::excite_strong_suppression:
      return gd * 0.25 * y * (1.0 - 2.0 * std::sqrt(y) + 3.0 * y * std::sqrt(y));
    case RateApproximation::excite_large_nbar: {
      const double br = 1.0 / (1.0 + x) - 1.0 / std::sqrt(1.0 + x);
      return 0.25 * gd * br * br;
    }
  }
  throw std::invalid_argument("rate_approximation: unknown variant");
}

std::vector<double> steady_photon_number(const SystemParams& params) {
  const double eps = params.epsilon;
  const double kap = params.kappa;
  const double drd = params.delta_rd;
  const double g = params.g;
  const double del = params.delta;
  if (kap == 0.0 && drd == 0.0)
    throw std::invalid_argument("steady_photon_number: need kappa > 0 or delta_rd != 0");
  if (eps == 0.0) return {0.0};
  const double flat = drd * drd + 0.25 * kap * kap;
  if (g == 0.0) return {eps * eps / flat};

  if (drd == 0.0) {
    // on-resonance drive: the left side is monotone, one root; Newton from
    // the bare-cavity seed with a bisection safeguard on [0, 16 eps^2/kappa^2]
    const double seed = 4.0 * eps * eps / (kap * kap);
    const double n = newton_root(0.0, 4.0 * seed, seed, params);
    // no root when the drive sits inside the vacuum Rabi gap (delta = 0 with
    // eps^2 < g^2/4): the left side jumps to g^2/4 for any n > 0
    if (std::abs(consistency_lhs(n, params) - eps * eps) > 1e-8 * eps * eps)
      throw root_error("steady_photon_number: drive below the vacuum Rabi gap");
    return {n};
  }

  // detuned drive: multiplying the relation by u^2 = delta^2 + 4 g^2 n turns
  // it into a quartic in u; enumerate its real roots with u >= |delta| to
  // catch all branches of the bistable fold, then polish each on n
  const double g2 = g * g;
  const double d2 = del * del;
  const double e2 = eps * eps;
  const double c4 = flat;
  const double c3 = 2.0 * g2 * drd;
  const double c2 = g2 * g2 - d2 * flat - 4.0 * g2 * e2;
  const double c1 = -2.0 * g2 * drd * d2;
  const double c0 = -g2 * g2 * d2;
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  comp(0, 3) = -c0 / c4;
  comp(1, 3) = -c1 / c4;
  comp(2, 3) = -c2 / c4;
  comp(3, 3) = -c3 / c4;
  const Eigen::Vector4cd us = Eigen::EigenSolver<Eigen::Matrix4d>(comp, false).eigenvalues();

  std::vector<double> roots;
  for (int k = 0; k < 4; ++k) {
    const double ur = us[k].real();
    if (std::abs(us[k].imag()) > 1e-6 * std::max(1.0, std::abs(ur))) continue;
    if (ur < std::abs(del) * (1.0 - 1e-12) || ur <= 0.0) continue;
    double n = std::max(0.0, (ur * ur - d2) / (4.0 * g2));
    // local Newton polish; the companion-matrix root is already close
    for (int it = 0; it < 40; ++it) {
      const double f = consistency_lhs(n, params) - e2;
      const double df = consistency_dlhs(n, params);
      if (df == 0.0) break;
      const double next = std::max(0.0, n - f / df);
      if (std::abs(next - n) <= 1e-15 * (1.0 + n)) {
        n = next;
        break;
      }
      n = next;
    }
    if (std::abs(consistency_lhs(n, params) - e2) > 1e-8 * e2) continue;
    roots.push_back(n);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return b - a <= 1e-8 * (1.0 + b); }),
              roots.end());
  if (roots.empty())
    throw root_error("steady_photon_number: no nonnegative real root survived");
  return roots;
}

double drive_for_photon_number(double n_bar_target, const SystemParams& params) {
  if (!(n_bar_target >= 0.0))
    throw std::invalid_argument("drive_for_photon_number: n_bar_target must be >= 0");
  return std::sqrt(consistency_lhs(n_bar_target, params));
}

ClassicalTrajectory classical_field_dynamics(const SystemParams& params,
                                             const std::vector<double>& t_grid,
                                             const FieldAmplitudes& initial) {
  if (t_grid.empty())
    throw std::invalid_argument("classical_field_dynamics: empty time grid");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i + 1] > t_grid[i]))
      throw std::invalid_argument("classical_field_dynamics: grid must increase strictly");
  if (params.delta == 0.0)
    throw std::invalid_argument("classical_field_dynamics: delta = 0 leaves lambda undefined");

  const double lam = params.lambda();
  const double l2 = lam * lam;
  const complexd i_unit(0.0, 1.0);
  auto rhs = [&](double, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd dy(2);
    for (int j = 0; j < 2; ++j) {
      const double s = (j == 0) ? 1.0 : -1.0;
      const LadderCoeffs c = ladder_coeffs(std::norm(y[j]), s, params);
      dy[j] = (-0.5 * c.kappa_eff + i_unit * c.pull) * y[j] -
              i_unit * params.epsilon * c.drive;
    }
    return dy;
  };

  OdeOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;

  ClassicalTrajectory out;
  out.t = t_grid;
  out.amplitudes.reserve(t_grid.size());
  Eigen::VectorXcd y(2);
  y << initial.alpha_e, initial.alpha_g;
  out.amplitudes.push_back(pack_amplitudes(y[0], y[1], l2));
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    integrate_dopri5(rhs, t_grid[i], t_grid[i + 1], y, opt);
    out.amplitudes.push_back(pack_amplitudes(y[0], y[1], l2));
  }
  for (const FieldAmplitudes& f : out.amplitudes) out.series_warning |= f.series_warning;
  return out;
}

FieldAmplitudes steady_state(const SystemParams& params) {
  if (params.delta == 0.0)
    throw std::invalid_argument("steady_state: delta = 0 leaves lambda undefined");
  const double lam = params.lambda();
  const double l2 = lam * lam;
  if (params.epsilon == 0.0) return pack_amplitudes({0.0, 0.0}, {0.0, 0.0}, l2);

  const double e2 = params.epsilon * params.epsilon;
  complexd alpha[2];
  for (int j = 0; j < 2; ++j) {
    const double s = (j == 0) ? 1.0 : -1.0;
    // fixed point of n = eps^2 C(n)^2 / ((kappa_eff(n)/2)^2 + B(n)^2), located
    // by expanding the bracket and bisecting; h(0) > 0 and h eventually < 0
    auto h = [&](double n) {
      const LadderCoeffs c = ladder_coeffs(n, s, params);
      return e2 * c.drive * c.drive /
                 (0.25 * c.kappa_eff * c.kappa_eff + c.pull * c.pull) -
             n;
    };
    double hi = 1.0;
    while (h(hi) > 0.0) {
      hi *= 2.0;
      if (hi > 1e12) throw root_error("steady_state: no classical fixed point found");
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;  // h(lo) > 0 by construction
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) > 0.0 ? lo : hi) = mid;
    }
    const double n = 0.5 * (lo + hi);
    const LadderCoeffs c = ladder_coeffs(n, s, params);
    alpha[j] = complexd(0.0, 1.0) * params.epsilon * c.drive /
               complexd(-0.5 * c.kappa_eff, c.pull);
  }
  return pack_amplitudes(alpha[0], alpha[1], l2);
}

EffectiveDetuning effective_detuning_three_level(double n, const SystemParams& params) {
  const double a = params.anharmonicity;
  if (a == 0.0)
    throw std::invalid_argument("effective_detuning_three_level: anharmonicity must be nonzero");
  if (a == params.delta)
    throw singular_configuration(
        "effective_detuning_three_level: anharmonicity equal to detuning");
  if (params.delta == 0.0)
    throw singular_configuration("effective_detuning_three_level: zero detuning");
  EffectiveDetuning out;
  out.n_crit_tilde =
      params.delta * params.delta / (4.0 * params.g * params.g) * (a - params.delta) / a;
  out.delta_eff = params.delta * (1.0 + n / (2.0 * out.n_crit_tilde));
  return out;
}

}  // namespace purcell
