#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/tensor.hpp"

namespace colsim {

/// Total qubits (system + ancillas) allowed in a dense state-vector run.
inline constexpr int max_dense_qubits = 22;

/// Cyclic coupling graph: ring of n_ancillas sites, coefficient c_l between
/// sites at ring distance l (l = 1..floor(n/2), shorter lists are
/// zero-padded), overall strength k.
struct CirculantGraphSpec {
  int n_ancillas = 0;
  std::vector<double> coeffs;
  double strength = 0.0;
};

inline int ring_distance(int i, int j, int n) {
  int d = std::abs(i - j);
  return std::min(d, n - d);
}

inline void validate_graph_spec(const CirculantGraphSpec& spec) {
  if (spec.n_ancillas < 1)
    throw ValidationError("CirculantGraphSpec: n_ancillas must be positive");
  if (static_cast<int>(spec.coeffs.size()) > spec.n_ancillas / 2) {
    std::ostringstream os;
    os << "CirculantGraphSpec: " << spec.coeffs.size()
       << " coefficients exceed floor(N_A/2) = " << spec.n_ancillas / 2;
    throw ValidationError(os.str());
  }
  if (!std::isfinite(spec.strength))
    throw ValidationError("CirculantGraphSpec: strength must be finite");
  for (double c : spec.coeffs)
    if (!std::isfinite(c)) throw ValidationError("CirculantGraphSpec: coefficients must be finite");
}

/// Symmetric circulant adjacency matrix with zero diagonal:
/// G(i,j) = c_{ring_distance(i,j)}.
inline Eigen::MatrixXd build_circulant_adjacency(const CirculantGraphSpec& spec) {
  validate_graph_spec(spec);
  const int n = spec.n_ancillas;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int d = ring_distance(i, j, n);
      if (d >= 1 && d <= static_cast<int>(spec.coeffs.size())) g(i, j) = spec.coeffs[d - 1];
    }
  return g;
}

/// exp(-i theta sigma_x (x) sigma_x): cos(theta) on the diagonal,
/// -i sin(theta) on the anti-diagonal.
inline ComplexMatrix xx_coupling_gate(double theta) {
  ComplexMatrix g = ComplexMatrix::Zero(4, 4);
  const Complex c(std::cos(theta), 0.0);
  const Complex ms(0.0, -std::sin(theta));
  for (int a = 0; a < 4; ++a) {
    g(a, a) = c;
    g(a, 3 - a) = ms;
  }
  return g;
}

/// exp(-i tau (sigma+ sigma- + sigma- sigma+)): identity on |00>, |11>;
/// rotation by tau in the {|01>, |10>} block. tau = pi/2 is the full swap
/// up to a phase.
inline ComplexMatrix partial_swap_gate(double tau) {
  ComplexMatrix g = ComplexMatrix::Identity(4, 4);
  g(1, 1) = g(2, 2) = Complex(std::cos(tau), 0.0);
  g(1, 2) = g(2, 1) = Complex(0.0, -std::sin(tau));
  return g;
}

/// Prepares exp(-i k sum_{i<j} G_ij sigma_x^i sigma_x^j) |phi>^{(x) N_A} as a
/// sequence of commuting two-qubit gates. With include_system, the state is
/// tensored with a system qubit |0> at index 0 (ancilla i then sits at qubit
/// index i). `site` is the single-site state |phi|, default |0>.
inline StateVector prepare_graph_state(const CirculantGraphSpec& spec, bool include_system,
                                       const Eigen::Vector2cd& site = Eigen::Vector2cd(1.0, 0.0)) {
  validate_graph_spec(spec);
  bool any_bond = false;
  for (double c : spec.coeffs) any_bond = any_bond || (c != 0.0);
  if (any_bond && spec.n_ancillas < 2)
    throw ValidationError("prepare_graph_state: bonds require at least two ancillas");
  if (std::abs(site.squaredNorm() - 1.0) > 1e-12)
    throw ValidationError("prepare_graph_state: site state must be normalized");

  const int offset = include_system ? 1 : 0;
  const int n = spec.n_ancillas + offset;
  if (n > max_dense_qubits) {
    std::ostringstream os;
    os << "prepare_graph_state: " << n << " qubits exceed the dense guard of "
       << max_dense_qubits;
    throw ResourceGuardError(os.str());
  }

  StateVector psi = StateVector::zero_state(n);
  if (site(0) != Complex(1.0, 0.0) || site(1) != Complex(0.0, 0.0)) {
    // Product state amplitudes: system bit (if any) pinned to 0.
    const std::size_t dim = psi.dim();
    for (std::size_t a = 0; a < dim; ++a) {
      if (include_system && (a & psi.qubit_mask(0))) {
        psi.amplitudes(a) = 0.0;
        continue;
      }
      Complex amp(1.0, 0.0);
      for (int q = offset; q < n; ++q) amp *= site((a >> (n - 1 - q)) & 1);
      psi.amplitudes(a) = amp;
    }
  }

  const Eigen::MatrixXd g = build_circulant_adjacency(spec);
  for (int i = 0; i < spec.n_ancillas; ++i)
    for (int j = i + 1; j < spec.n_ancillas; ++j)
      if (g(i, j) != 0.0)
        apply_two_qubit_gate_in_place(psi, xx_coupling_gate(spec.strength * g(i, j)),
                                      i + offset, j + offset);
  return psi;
}

inline double excited_population(const DensityMatrix& rho) {
  return rho(1, 1).real();
}

/// Excited-state population <1|rho_{A_1}|1> of a single site of the prepared
/// graph state; equal across sites by translational invariance.
inline double ancilla_local_population(const CirculantGraphSpec& spec) {
  const StateVector psi = prepare_graph_state(spec, false);
  return excited_population(reduced_density_matrix(psi, {0}));
}

struct QubitCollisionConfig {
  CirculantGraphSpec graph;
  double tau = 1.0;
  int n_collisions = 0;
  bool record_mi = false;
  int mi_reference_ancilla = 1;
  bool record_uncorrelated = true;
  /// Single-site ancilla state |phi> used in the preparation (extension; the
  /// default |0> matches the baseline model).
  Eigen::Vector2cd site = Eigen::Vector2cd(1.0, 0.0);
};

/// Per-collision record. populations[n] is the system excited-state
/// population after collision n (entry 0 is the pre-collision value).
/// Empty vectors mean "not recorded". mi_profiles[step][t] is
/// I(reference : mi_partners[t]) after `step` collisions.
struct Trajectory {
  std::vector<double> populations;
  std::vector<double> uncorrelated_populations;
  std::vector<std::vector<double>> mi_profiles;
  std::vector<int> mi_partners;
};

inline void validate_density_2x2(const Eigen::Matrix2cd& rho, const char* who) {
  if (hermiticity_defect(rho) > 1e-10) {
    std::ostringstream os;
    os << who << ": ancilla state not Hermitian";
    throw ValidationError(os.str());
  }
  if (std::abs(rho.trace().real() - 1.0) > tol::trace || std::abs(rho.trace().imag()) > tol::trace) {
    std::ostringstream os;
    os << who << ": ancilla state trace deviates from 1";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < tol::eigenvalue_floor) {
    std::ostringstream os;
    os << who << ": ancilla state has negative eigenvalue " << es.eigenvalues().minCoeff();
    throw ValidationError(os.str());
  }
}

/// Markovian reference: iterates rho_S <- tr_A[U (rho_S (x) rho_A) U^dagger]
/// with U the partial swap, starting from diag(1-p0, p0). Returns the
/// excited-state population at every step, entry 0 being p0. Exact and O(1)
/// per step; no many-body state is ever formed.
inline std::vector<double> run_uncorrelated_reference(const Eigen::Matrix2cd& rho_ancilla,
                                                      double tau, int n, double p0) {
  if (n < 1) throw ValidationError("run_uncorrelated_reference: n must be >= 1");
  if (p0 < -1e-12 || p0 > 1.0 + 1e-12)
    throw ValidationError("run_uncorrelated_reference: p0 outside [0, 1]");
  validate_density_2x2(rho_ancilla, "run_uncorrelated_reference");

  const Eigen::Matrix4cd u = partial_swap_gate(tau);
  Eigen::Matrix2cd rho_s = Eigen::Matrix2cd::Zero();
  rho_s(0, 0) = 1.0 - p0;
  rho_s(1, 1) = p0;

  std::vector<double> populations;
  populations.reserve(n + 1);
  populations.push_back(p0);
  for (int step = 0; step < n; ++step) {
    Eigen::Matrix4cd joint;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        joint.block<2, 2>(2 * a, 2 * b) = rho_s(a, b) * rho_ancilla;
    joint = u * joint * u.adjoint();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        rho_s(a, b) = joint(2 * a, 2 * b) + joint(2 * a + 1, 2 * b + 1);
    populations.push_back(rho_s(1, 1).real());
  }
  return populations;
}

/// Runs the correlated collision sequence: system |0> (x) graph state, one
/// partial swap per ancilla in ring order. Records populations, the
/// matched uncorrelated reference, and optionally the mutual-information
/// profile I(ref : m) after every step (step 0 = prepared state).
inline Trajectory run_correlated_collisions(const QubitCollisionConfig& config) {
  validate_graph_spec(config.graph);
  const int na = config.graph.n_ancillas;
  if (config.n_collisions < 1 || config.n_collisions > na) {
    std::ostringstream os;
    os << "run_correlated_collisions: n_collisions " << config.n_collisions
       << " outside [1, N_A = " << na << "] (each ancilla participates only once)";
    throw ValidationError(os.str());
  }
  if (na + 1 > max_dense_qubits) {
    std::ostringstream os;
    os << "run_correlated_collisions: " << na + 1 << " qubits exceed the dense guard of "
       << max_dense_qubits;
    throw ResourceGuardError(os.str());
  }
  if (!std::isfinite(config.tau))
    throw ValidationError("run_correlated_collisions: tau must be finite");
  if (config.record_mi &&
      (config.mi_reference_ancilla < 1 || config.mi_reference_ancilla > na))
    throw ValidationError("run_correlated_collisions: mi_reference_ancilla out of range");

  StateVector psi = prepare_graph_state(config.graph, true, config.site);

  Trajectory traj;
  traj.populations.reserve(config.n_collisions + 1);

  const Eigen::Matrix2cd rho_a = reduced_density_matrix(psi, {1});
  const double p0 = excited_population(reduced_density_matrix(psi, {0}));
  traj.populations.push_back(p0);

  if (config.record_uncorrelated)
    traj.uncorrelated_populations =
        run_uncorrelated_reference(rho_a, config.tau, config.n_collisions, p0);

  const int ref = config.mi_reference_ancilla;
  auto record_mi_profile = [&]() {
    std::vector<double> profile;
    profile.reserve(na - 1);
    for (int m = 1; m <= na; ++m) {
      if (m == ref) continue;
      profile.push_back(mutual_information(psi, ref, m));
    }
    traj.mi_profiles.push_back(std::move(profile));
  };
  if (config.record_mi) {
    for (int m = 1; m <= na; ++m)
      if (m != ref) traj.mi_partners.push_back(m);
    record_mi_profile();
  }

  const ComplexMatrix swap = partial_swap_gate(config.tau);
  for (int step = 1; step <= config.n_collisions; ++step) {
    apply_two_qubit_gate_in_place(psi, swap, 0, step);
    const double p = excited_population(reduced_density_matrix(psi, {0}));
    if (p < -1e-10 || p > 1.0 + 1e-10)
      throw PhysicalityError("run_correlated_collisions: population left [0, 1]");
    traj.populations.push_back(p);
    if (config.record_mi) record_mi_profile();
  }
  return traj;
}

}  // namespace colsim
