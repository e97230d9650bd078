#include "purcell/dressed.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "purcell/errors.hpp"

namespace purcell {

double mixing_angle(double n, const SystemParams& params) {
  if (n < 0.0) throw std::invalid_argument("excitation number must be non-negative");
  if (n == 0.0 || params.g == 0.0) return 0.0;
  if (params.delta == 0.0) return sgn_or_plus(params.g) * pi / 4.0;
  return 0.5 * std::atan(2.0 * params.g * std::sqrt(n) / params.delta);
}

DressedBasis::DressedBasis(const SystemParams& p)
    : params(p),
      n_crit(p.g == 0.0 ? std::numeric_limits<double>::infinity()
                        : p.delta * p.delta / (4.0 * p.g * p.g)) {}

double DressedBasis::theta(double n) const { return mixing_angle(n, params); }

double DressedBasis::splitting(double n) const {
  return sgn_or_plus(params.delta) *
         std::sqrt(params.delta * params.delta + 4.0 * n * params.g * params.g);
}

double critical_photon_number(const SystemParams& params) {
  if (params.g == 0.0) throw std::invalid_argument("critical photon number needs g != 0");
  return params.delta * params.delta / (4.0 * params.g * params.g);
}

Eigen::VectorXcd dressed_state(DressedLabel label, int n, const SystemParams& params,
                               const SpaceDescriptor& space) {
  if (n < 0) throw std::invalid_argument("excitation number must be non-negative");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dim());
  if (label == DressedLabel::excited) {
    if (n + 1 > space.fock_cutoff) throw truncation_error("dressed pair exceeds the Fock cutoff");
    const double t = mixing_angle(n + 1.0, params);
    v(space.index(1, n)) = std::cos(t);
    v(space.index(0, n + 1)) = std::sin(t);
  } else {
    if (n > space.fock_cutoff) throw truncation_error("dressed pair exceeds the Fock cutoff");
    const double t = mixing_angle(n, params);
    v(space.index(0, n)) = std::cos(t);
    if (n >= 1) v(space.index(1, n - 1)) = -std::sin(t);
  }
  return v;
}

JumpRates jump_rates(double n, const SystemParams& params) {
  if (n < 0.0) throw std::invalid_argument("excitation number must be non-negative");
  const double t_up = mixing_angle(n + 1.0, params);
  const double t_n = mixing_angle(n, params);
  JumpRates out;
  out.n = n;
  const double rel = std::sqrt(n + 1.0) * std::sin(t_up) * std::cos(t_n) -
                     std::sqrt(n) * std::sin(t_n) * std::cos(t_up);
  out.gamma_R_n = params.kappa * rel * rel;
  if (n >= 2.0) {
    const double t_dn = mixing_angle(n - 1.0, params);
    const double exc = std::sqrt(n - 1.0) * std::sin(t_n) * std::cos(t_dn) -
                       std::sqrt(n) * std::sin(t_dn) * std::cos(t_n);
    out.gamma_E_n = params.kappa * exc * exc;
  } else {
    out.gamma_E_n = 0.0;
  }
  return out;
}

Eigen::MatrixXcd diagonalizing_transform(const SystemParams& params, const SpaceDescriptor& space) {
  const int d = space.dim();
  const double lam = params.g == 0.0 ? 0.0 : params.lambda();
  // Lambda(N_e) entrywise on the (diagonal) excitation number. The N_e = 0
  // value is the removable-singularity limit; it multiplies the kernel of
  // I_-, so any finite choice yields the same D.
  Eigen::VectorXcd lam_diag(d);
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n <= space.fock_cutoff; ++n) {
      const double m = n + q;
      double val;
      if (m == 0.0)
        val = std::isfinite(lam) ? lam : 0.0;
      else
        val = std::atan(2.0 * lam * std::sqrt(m)) / (2.0 * std::sqrt(m));
      lam_diag(space.index(q, n)) = val;
    }
  }
  const Eigen::MatrixXcd a = elementary_operator(Op::annihilation, space);
  const Eigen::MatrixXcd im = elementary_operator(Op::sigma_plus, space) * a -
                              elementary_operator(Op::sigma_minus, space) * a.adjoint();
  const Eigen::MatrixXcd gen = lam_diag.asDiagonal() * im;  // anti-Hermitian
  // exp(-gen) through the Hermitian eigendecomposition of i*gen; unitary up
  // to solver orthonormality
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complexd(0.0, 1.0) * gen);
  Eigen::VectorXcd phase(d);
  for (int k = 0; k < d; ++k) phase(k) = std::exp(complexd(0.0, es.eigenvalues()(k)));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd transformed_annihilation(const SystemParams& params, const SpaceDescriptor& space) {
  const Eigen::MatrixXcd d = diagonalizing_transform(params, space);
  return d.adjoint() * elementary_operator(Op::annihilation, space) * d;
}

Eigen::MatrixXcd transformed_annihilation_series(const SystemParams& params,
                                                 const SpaceDescriptor& space, int order) {
  if (order < 1 || order > 7) throw std::invalid_argument("series order must be in 1..7");
  const double lam = params.g == 0.0 ? 0.0 : params.lambda();
  if (!(std::abs(lam) * std::sqrt(double(space.fock_cutoff)) < 0.5))
    throw std::invalid_argument("dispersive expansion needs |lambda| sqrt(N_max) < 1/2");

  const int d = space.dim();
  const Eigen::MatrixXcd a = elementary_operator(Op::annihilation, space);
  const Eigen::MatrixXcd sz = elementary_operator(Op::sigma_z, space);
  const Eigen::MatrixXcd nhat = elementary_operator(Op::number, space);
  const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd n2 = nhat * nhat;
  const double l2 = lam * lam, l4 = l2 * l2, l6 = l4 * l2;

  // number-dependent coefficients act from the left of their ladder factor
  Eigen::MatrixXcd f1 = one;
  if (order >= 2) f1 += (l2 / 2.0) * sz;
  if (order >= 4) f1 -= (l4 / 8.0) * (12.0 * (nhat + one) * sz + one);
  if (order >= 6) f1 += l6 * ((5.0 * n2 + 10.0 * nhat + (73.0 / 16.0) * one) * sz + (nhat + one) / 4.0);
  Eigen::MatrixXcd out = f1 * a;

  Eigen::MatrixXcd f2 = one;
  if (order >= 3) f2 -= 1.5 * l2 * (2.0 * nhat + one);
  if (order >= 5) f2 += l4 * (11.0 * n2 + 11.0 * nhat + (31.0 / 8.0) * one);
  if (order >= 7) f2 -= l6 * (42.0 * n2 * nhat + 63.0 * n2 + (355.0 / 8.0) * nhat + (187.0 / 16.0) * one);
  out += lam * f2 * elementary_operator(Op::sigma_minus, space);

  if (order >= 3) {
    Eigen::MatrixXcd f3 = one;
    if (order >= 5) f3 -= 2.5 * l2 * (2.0 * nhat + 3.0 * one);
    if (order >= 7) f3 += l4 * (22.0 * n2 + 66.0 * nhat + (411.0 / 8.0) * one);
    out += (lam * l2) * f3 * (a * a * elementary_operator(Op::sigma_plus, space));
  }
  return out;
}

std::array<double, 4> spectral_lines(double n_bar, const SystemParams& params) {
  if (n_bar < 0.0) throw std::invalid_argument("mean photon number must be non-negative");
  const double os = sgn_or_plus(params.delta) *
                    std::sqrt(params.delta * params.delta + 4.0 * n_bar * params.g * params.g);
  const double pull = params.g == 0.0 ? 0.0 : params.g * params.g / os;
  return {pull, -pull, os, -os};
}

}  // namespace purcell
