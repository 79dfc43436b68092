#pragma once

// Independent reference for the qubit collision dynamics: dense
// density-matrix evolution of the full chain, one 2^n-dimensional unitary per
// collision, everything built with the Taylor-series exponential. Shared by
// the unit suite and the acceptance runner to validate the gate-sequence
// state-vector path.

#include <vector>

#include "colsim/qubit.hpp"
#include "test_util.hpp"

namespace testutil {

inline std::vector<double> dense_oracle_populations(const colsim::CirculantGraphSpec& spec,
                                                    double tau, int n_collisions) {
  using colsim::Complex;
  const int n = spec.n_ancillas + 1;
  const std::size_t dim = std::size_t{1} << n;

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXd g = colsim::build_circulant_adjacency(spec);
  const Eigen::Matrix4cd xx = kron(pauli_x(), pauli_x());
  for (int i = 0; i < spec.n_ancillas; ++i)
    for (int j = i + 1; j < spec.n_ancillas; ++j)
      if (g(i, j) != 0.0) h += g(i, j) * embed_two_qubit_operator(xx, i + 1, j + 1, n);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = 1.0;
  psi = taylor_expm(Complex(0.0, -spec.strength) * h) * psi;
  Eigen::MatrixXcd rho = psi * psi.adjoint();

  Eigen::Matrix4cd hswap = Eigen::Matrix4cd::Zero();
  hswap(1, 2) = hswap(2, 1) = 1.0;

  const std::size_t sys_mask = dim >> 1;
  auto population = [&](const Eigen::MatrixXcd& r) {
    double p = 0.0;
    for (std::size_t a = 0; a < dim; ++a)
      if (a & sys_mask) p += r(a, a).real();
    return p;
  };

  std::vector<double> populations{population(rho)};
  for (int step = 1; step <= n_collisions; ++step) {
    Eigen::MatrixXcd u =
        taylor_expm(Complex(0.0, -tau) * embed_two_qubit_operator(hswap, 0, step, n));
    rho = u * rho * u.adjoint();
    populations.push_back(population(rho));
  }
  return populations;
}

}  // namespace testutil
