#include "purcell/single_excitation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "purcell/errors.hpp"

namespace purcell {

namespace {

// Mixing angle of the lowest dressed pair, plain arctangent branch so that
// theta is odd in delta and theta -> pi/4 on resonance.
double mixing_theta1(double g, double delta) {
  if (g == 0.0) return 0.0;
  if (delta == 0.0) return pi / 4.0;
  return 0.5 * std::atan(2.0 * g / delta);
}

}  // namespace

Eigen::Matrix4cd evolution_matrix(const SystemParams& params) {
  const double g = params.g;
  const complexd i(0.0, 1.0);
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 2) = i * g;
  m(1, 1) = -params.kappa;
  m(1, 2) = -i * g;
  m(2, 0) = 2.0 * i * g;
  m(2, 1) = -2.0 * i * g;
  m(2, 2) = -params.kappa / 2.0;
  m(2, 3) = -i * params.delta;
  m(3, 2) = -i * params.delta;
  m(3, 3) = -params.kappa / 2.0;
  return m;
}

ComplexEigenpair complex_eigenenergies(const SystemParams& params) {
  const double g = params.g, kappa = params.kappa, delta = params.delta;
  // The printed nested-radical forms cancel badly when kappa*|delta| is
  // small. Rewrite both sqrt((R +- A)/2) factors so that the subtraction
  // only ever happens between same-sign quantities: whichever of Omega, B
  // would suffer cancellation is recovered from kappa|delta|/(2 * other).
  const double a = delta * delta + 4.0 * g * g - kappa * kappa / 4.0;
  const double r = std::hypot(a, kappa * delta);
  const double s = delta * delta + 4.0 * g * g + kappa * kappa / 4.0;
  double b, omega_mag;
  if (a >= 0.0) {
    omega_mag = std::sqrt((r + a) / 2.0);
    b = (omega_mag > 0.0) ? kappa * std::abs(delta) / (2.0 * omega_mag) : 0.0;
  } else {
    b = std::sqrt((r - a) / 2.0);
    omega_mag = kappa * std::abs(delta) / (2.0 * b);
  }
  ComplexEigenpair out;
  out.Gamma = (kappa == 0.0) ? 0.0 : 4.0 * g * g * kappa * kappa / ((s + r) * (kappa + 2.0 * b));
  out.Omega = sgn_or_plus(delta) * omega_mag;
  out.E_e = complexd(out.Omega / 2.0, -out.Gamma / 2.0);
  out.E_1 = complexd(-out.Omega / 2.0, -(kappa - out.Gamma) / 2.0);
  return out;
}

double purcell_rate_nodrive(const SystemParams& params, PurcellVariant variant) {
  const double g = params.g, kappa = params.kappa, delta = params.delta;
  switch (variant) {
    case PurcellVariant::exact:
      return complex_eigenenergies(params).Gamma;
    case PurcellVariant::golden_rule:
      return kappa * g * g / (delta * delta + kappa * kappa / 4.0);
    case PurcellVariant::dispersive:
      if (delta == 0.0) throw std::invalid_argument("dispersive Purcell rate needs nonzero detuning");
      return kappa * g * g / (delta * delta);
    case PurcellVariant::eigenstate_overlap:
      if (g == 0.0) return 0.0;
      return 0.5 * kappa * (1.0 - std::abs(delta) / std::sqrt(delta * delta + 4.0 * g * g));
  }
  throw std::invalid_argument("unknown Purcell variant");
}

SingleExcitationState eigenbasis_coefficients(const SystemParams& params, complexd alpha, complexd beta) {
  SingleExcitationState st;
  st.alpha = alpha;
  st.beta = beta;
  const double g = params.g, kappa = params.kappa, delta = params.delta;
  if (g == 0.0) {
    st.c_e = alpha;
    st.c_1 = beta;
    return st;
  }
  // Eigenvalues of the complex-symmetric 2x2 Hamiltonian in (|e,0>, |g,1>),
  // paired with the closed forms so that e_e is the qubit-like root.
  const auto pair = complex_eigenenergies(params);
  const complexd u(delta / 2.0, kappa / 4.0);
  const complexd w = std::sqrt(u * u + g * g);
  complexd e_e = complexd(0.0, -kappa / 4.0) + w;
  complexd e_1 = complexd(0.0, -kappa / 4.0) - w;
  if (std::abs(e_e - pair.E_e) > std::abs(e_1 - pair.E_e)) std::swap(e_e, e_1);

  // Unit-norm right eigenvectors (g, E - delta/2), individually normalized.
  Eigen::Vector2cd ve(g, e_e - delta / 2.0), v1(g, e_1 - delta / 2.0);
  ve.normalize();
  v1.normalize();

  // Perpendicular-vector expansion: the matrix is complex symmetric, so the
  // left eigenvectors are plain transposes and <x_perp| uses no conjugation.
  const complexd denom = ve(0) * v1(1) - ve(1) * v1(0);
  if (std::abs(denom) < 1e-10)
    throw singular_configuration("decaying eigenbasis is defective (exceptional point)");
  st.c_1 = (ve(0) * beta - ve(1) * alpha) / denom;
  st.c_e = (v1(1) * alpha - v1(0) * beta) / denom;
  return st;
}

NoDriveTrace population_trace_nodrive(const SystemParams& params, NoDriveInitial initial,
                                      const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0.0 || (k > 0 && t_grid[k] < t_grid[k - 1]))
      throw std::invalid_argument("time grid must be sorted and non-negative");
  }

  const double g = params.g, kappa = params.kappa, delta = params.delta;
  const double theta = mixing_theta1(g, delta);
  const double c = std::cos(theta), sn = std::sin(theta);

  Eigen::Vector4cd v0;
  if (initial == NoDriveInitial::bare_e0) {
    v0 << 1.0, 0.0, 0.0, 0.0;
  } else {
    v0 << c * c, sn * sn, 0.0, 2.0 * sn * c;
  }

  const auto pair = complex_eigenenergies(params);
  const double gp = purcell_rate_nodrive(params, PurcellVariant::eigenstate_overlap);
  const double lam2 = (g * g) / (delta * delta);
  // bare start: dispersive two-term trace; eigenstate start: slow decay with
  // a small residual oscillation of amplitude g^2 kappa^2 / (2 delta^4).
  const double amp = (initial == NoDriveInitial::bare_e0)
                         ? 2.0 * lam2
                         : g * g * kappa * kappa / (2.0 * delta * delta * delta * delta);

  const Eigen::Matrix4cd m = evolution_matrix(params);
  NoDriveTrace out;
  out.exact.reserve(t_grid.size());
  out.approximate.reserve(t_grid.size());
  for (double t : t_grid) {
    const Eigen::Vector4cd v = (m * t).exp() * v0;
    if (initial == NoDriveInitial::bare_e0) {
      out.exact.push_back(v(0).real());
      out.approximate.push_back((1.0 - amp) * std::exp(-gp * t) +
                                amp * std::cos(pair.Omega * t) * std::exp(-kappa * t / 2.0));
    } else {
      out.exact.push_back((c * c * v(0) + sn * sn * v(1) + sn * c * v(3)).real());
      out.approximate.push_back((1.0 + amp) * std::exp(-gp * t) -
                                amp * std::cos(pair.Omega * t) * std::exp(-kappa * t / 2.0));
    }
  }
  return out;
}

}  // namespace purcell
