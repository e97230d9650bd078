#include <random>

#include "doctest.h"
#include "purcell/errors.hpp"
#include "purcell/hilbert.hpp"

using namespace purcell;

TEST_SUITE_BEGIN("hilbert");

TEST_CASE("space dimensions and index layout") {
  CHECK(make_space(0).dim() == 2);
  CHECK(make_space(30).dim() == 62);
  CHECK_THROWS_AS(make_space(-1), std::invalid_argument);
  const auto s = make_space(5);
  CHECK(s.index(0, 0) == 0);
  CHECK(s.index(1, 0) == 6);  // qubit slow, Fock fast
  CHECK(s.index(1, 5) == 11);
}

TEST_CASE("default cutoff policy") {
  CHECK(default_cutoff(0.0) == 25);
  CHECK(default_cutoff(40.0) == 120);  // ceil(40 + 10 sqrt(41) + 15)
  CHECK_THROWS_AS(default_cutoff(-1.0), std::invalid_argument);
}

TEST_CASE("ladder operators") {
  const auto s = make_space(6);
  const auto a = elementary_operator(Op::annihilation, s);
  const auto ad = elementary_operator(Op::creation, s);

  Eigen::VectorXcd fock3 = Eigen::VectorXcd::Zero(s.dim());
  fock3(s.index(0, 3)) = 1.0;
  Eigen::VectorXcd lowered = a * fock3;
  CHECK(std::abs(lowered(s.index(0, 2)) - std::sqrt(3.0)) < 1e-15);
  CHECK(lowered.norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  CHECK((ad - a.adjoint()).norm() == 0.0);  // creation is exactly the adjoint

  // [a, a^dag] = 1 everywhere except the top retained Fock level, where the
  // defect quantifies the truncation
  Eigen::MatrixXcd comm = a * ad - ad * a;
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n < s.fock_cutoff; ++n)
      CHECK(std::abs(comm(s.index(q, n), s.index(q, n)) - 1.0) < 4e-16 * (2.0 * n + 1.0));
    CHECK(std::abs(comm(s.index(q, s.fock_cutoff), s.index(q, s.fock_cutoff)) - (-double(s.fock_cutoff))) < 1e-12);
  }
}

TEST_CASE("qubit operators") {
  const auto s = make_space(3);
  const auto sp = elementary_operator(Op::sigma_plus, s);
  const auto sm = elementary_operator(Op::sigma_minus, s);
  const auto sz = elementary_operator(Op::sigma_z, s);
  CHECK((sp * sm - sm * sp - sz).norm() == 0.0);
  const auto ne = elementary_operator(Op::total_excitations, s);
  const auto nhat = elementary_operator(Op::number, s);
  CHECK((ne - nhat - sp * sm).norm() == 0.0);
}

TEST_CASE("rotating-frame Hamiltonian") {
  const auto s = make_space(8);
  SystemParams p{.g = 0.7, .kappa = 0.0, .delta = 3.1, .epsilon = 0.0};
  auto h = hamiltonian_rotating(p, s);

  CHECK(std::abs(h(s.index(1, 0), s.index(1, 0)) - 0.5 * p.delta) < 1e-15);
  // JC block structure: |e,n> couples only to |g,n+1>, element g sqrt(n+1)
  for (int n = 0; n + 1 <= s.fock_cutoff; ++n)
    CHECK(std::abs(h(s.index(0, n + 1), s.index(1, n)) - p.g * std::sqrt(n + 1.0)) < 1e-15);
  CHECK(std::abs(h(s.index(0, 1), s.index(0, 0))) == 0.0);

  p.epsilon = 0.45;
  h = hamiltonian_rotating(p, s);
  CHECK(std::abs(h(s.index(0, 1), s.index(0, 0)) - p.epsilon) < 1e-15);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    SystemParams q{.g = u(rng), .kappa = 0.0, .delta = u(rng), .epsilon = u(rng)};
    auto hq = hamiltonian_rotating(q, s);
    CHECK((hq - hq.adjoint()).norm() < 1e-12 * hq.norm());
  }

  SystemParams detuned = p;
  detuned.delta_rd = 0.2;
  CHECK_THROWS_AS(hamiltonian_rotating(detuned, s), unsupported_configuration);
}

TEST_CASE("total excitations conserved without drive") {
  const auto s = make_space(10);
  SystemParams p{.g = 1.3, .kappa = 0.0, .delta = -2.0, .epsilon = 0.0};
  const auto h = hamiltonian_rotating(p, s);
  const auto ne = elementary_operator(Op::total_excitations, s);
  CHECK((ne * h - h * ne).norm() < 1e-12);
}

TEST_CASE("displacement operator") {
  const auto s = make_space(40);
  CHECK((displacement(0.0, s) - Eigen::MatrixXcd::Identity(s.dim(), s.dim())).norm() < 1e-14);

  const complexd alpha(1.2, -1.6);  // |alpha|^2 = 4
  const auto d = displacement(alpha, s);
  // direct evaluation gives ~4e-14; the 1e-8 budget covers truncation policy
  CHECK((d.adjoint() * d - Eigen::MatrixXcd::Identity(s.dim(), s.dim())).norm() < 1e-8);
  CHECK((d * displacement(-alpha, s) - Eigen::MatrixXcd::Identity(s.dim(), s.dim())).norm() < 1e-8);

  // coherent-state Poisson populations from the displaced vacuum
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(s.dim());
  vac(s.index(0, 0)) = 1.0;
  Eigen::VectorXcd coh = d * vac;
  const double n2 = std::norm(alpha);
  double logw = -n2;
  for (int n = 0; n <= 12; ++n) {
    CHECK(std::abs(std::norm(coh(s.index(0, n))) - std::exp(logw)) < 1e-12);
    logw += std::log(n2) - std::log(n + 1.0);
  }

  CHECK_THROWS_AS(displacement(complexd(3.5, 0.0), s), truncation_error);  // 12.25 > 10
}

TEST_SUITE_END();
