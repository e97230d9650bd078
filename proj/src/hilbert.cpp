#include "purcell/hilbert.hpp"

#include <cmath>
#include <stdexcept>

#include "purcell/errors.hpp"

namespace purcell {

SpaceDescriptor make_space(int fock_cutoff) {
  if (fock_cutoff < 0) throw std::invalid_argument("fock_cutoff must be >= 0");
  return SpaceDescriptor{fock_cutoff};
}

int default_cutoff(double n_bar_target) {
  if (n_bar_target < 0) throw std::invalid_argument("n_bar_target must be >= 0");
  return static_cast<int>(std::ceil(n_bar_target + 10.0 * std::sqrt(n_bar_target + 1.0) + 15.0));
}

Eigen::MatrixXcd elementary_operator(Op kind, const SpaceDescriptor& space) {
  const int nf = space.fock_dim();
  const int d = space.dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  switch (kind) {
    case Op::annihilation:
      for (int q = 0; q < 2; ++q)
        for (int n = 1; n < nf; ++n) m(space.index(q, n - 1), space.index(q, n)) = std::sqrt(double(n));
      break;
    case Op::creation:
      return elementary_operator(Op::annihilation, space).adjoint();
    case Op::number:
      for (int q = 0; q < 2; ++q)
        for (int n = 0; n < nf; ++n) m(space.index(q, n), space.index(q, n)) = double(n);
      break;
    case Op::sigma_plus:
      for (int n = 0; n < nf; ++n) m(space.index(1, n), space.index(0, n)) = 1.0;
      break;
    case Op::sigma_minus:
      for (int n = 0; n < nf; ++n) m(space.index(0, n), space.index(1, n)) = 1.0;
      break;
    case Op::sigma_z:
      for (int n = 0; n < nf; ++n) {
        m(space.index(0, n), space.index(0, n)) = -1.0;
        m(space.index(1, n), space.index(1, n)) = 1.0;
      }
      break;
    case Op::total_excitations:
      for (int q = 0; q < 2; ++q)
        for (int n = 0; n < nf; ++n) m(space.index(q, n), space.index(q, n)) = double(n + q);
      break;
    case Op::identity:
      m.setIdentity();
      break;
  }
  return m;
}

Eigen::MatrixXcd hamiltonian_rotating(const SystemParams& params, const SpaceDescriptor& space) {
  if (params.delta_rd != 0.0)
    throw unsupported_configuration("hamiltonian_rotating requires a resonant drive (delta_rd = 0)");
  const Eigen::MatrixXcd a = elementary_operator(Op::annihilation, space);
  const Eigen::MatrixXcd sm = elementary_operator(Op::sigma_minus, space);
  const Eigen::MatrixXcd sz = elementary_operator(Op::sigma_z, space);
  Eigen::MatrixXcd h = 0.5 * params.delta * sz;
  h += params.g * (a.adjoint() * sm + (a.adjoint() * sm).adjoint());
  h += params.epsilon * (a + Eigen::MatrixXcd(a.adjoint()));
  return h;
}

Eigen::MatrixXcd displacement(complexd alpha, const SpaceDescriptor& space) {
  if (std::norm(alpha) > space.fock_cutoff / 4.0)
    throw truncation_error("displacement amplitude too large for cutoff: |alpha|^2 > N_max/4");
  const Eigen::MatrixXcd a = elementary_operator(Op::annihilation, space);
  const Eigen::MatrixXcd gen = alpha * a.adjoint() - std::conj(alpha) * a;
  // exp of the anti-Hermitian generator via Hermitian eigendecomposition of
  // i*gen; exactly unitary at machine precision, unlike a truncated Taylor sum.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complexd(0, 1) * gen);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (int k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(complexd(0, -es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace purcell
