#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include "colsim/errors.hpp"

namespace colsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Density matrices are ordinary dense complex matrices; validity
/// (Hermiticity, unit trace, positivity) is enforced at the operations
/// that consume them.
using DensityMatrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double hermiticity = 1e-12;
inline constexpr double unitarity = 1e-10;
inline constexpr double trace = 1e-8;
inline constexpr double eigenvalue_floor = -1e-8;
inline constexpr double entropy_clamp = 1e-12;
}  // namespace tol

/// Pure state of n qubits. Qubit 0 maps to the most significant bit of the
/// amplitude index, so |q0 q1 ... q_{n-1}> sits at index
/// q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}. All gate and partial-trace
/// routines below honor this convention.
struct StateVector {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;

  /// |0...0>
  static StateVector zero_state(int n_qubits) {
    if (n_qubits < 1) throw ValidationError("StateVector: n_qubits must be positive");
    StateVector psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes = Eigen::VectorXcd::Zero(std::size_t{1} << n_qubits);
    psi.amplitudes(0) = 1.0;
    return psi;
  }

  static StateVector from_amplitudes(int n_qubits, Eigen::VectorXcd amps) {
    if (n_qubits < 1) throw ValidationError("StateVector: n_qubits must be positive");
    if (amps.size() != static_cast<Eigen::Index>(std::size_t{1} << n_qubits))
      throw ValidationError("StateVector: amplitude count does not match qubit count");
    const double norm2 = amps.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "StateVector: squared norm " << norm2 << " deviates from 1 beyond 1e-12";
      throw ValidationError(os.str());
    }
    StateVector psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes = std::move(amps);
    return psi;
  }

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }

  /// Amplitude-index bit mask of qubit q under the bit-0-most-significant layout.
  std::size_t qubit_mask(int q) const { return std::size_t{1} << (n_qubits - 1 - q); }
};

inline double max_abs(const ComplexMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

/// Largest entry of |M - M^dagger|.
inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("hermiticity_defect: matrix not square");
  return max_abs(m - m.adjoint());
}

/// Largest entry of |U U^dagger - I|.
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw ValidationError("unitarity_defect: matrix not square");
  return max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols()));
}

/// exp(-i * scale * H) for Hermitian H, via real-eigenvalue eigendecomposition.
inline ComplexMatrix hermitian_unitary(const ComplexMatrix& h, double scale) {
  if (h.rows() != h.cols()) throw ValidationError("hermitian_unitary: matrix not square");
  const double defect = hermiticity_defect(h);
  if (defect > tol::hermiticity) {
    std::ostringstream os;
    os << "hermitian_unitary: input not Hermitian, max asymmetry " << defect;
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Eigen::VectorXd& lam = es.eigenvalues();
  Eigen::VectorXcd phases(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -scale * lam(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {

inline void check_qubit_index(const StateVector& psi, int q, const char* who) {
  if (q < 0 || q >= psi.n_qubits) {
    std::ostringstream os;
    os << who << ": qubit index " << q << " out of range [0, " << psi.n_qubits << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace detail

/// Applies a 4x4 gate to qubits (i, j) of the state, in place. The gate basis
/// is |b_i b_j> in the order 00, 01, 10, 11.
inline void apply_two_qubit_gate_in_place(StateVector& psi, const ComplexMatrix& gate,
                                          int i, int j) {
  detail::check_qubit_index(psi, i, "apply_two_qubit_gate");
  detail::check_qubit_index(psi, j, "apply_two_qubit_gate");
  if (i == j) throw ValidationError("apply_two_qubit_gate: qubit indices must differ");
  if (gate.rows() != 4 || gate.cols() != 4)
    throw ValidationError("apply_two_qubit_gate: gate must be 4x4");
  const double defect = unitarity_defect(gate);
  if (defect > tol::unitarity) {
    std::ostringstream os;
    os << "apply_two_qubit_gate: gate not unitary, defect " << defect;
    throw ValidationError(os.str());
  }

  const std::size_t mi = psi.qubit_mask(i);
  const std::size_t mj = psi.qubit_mask(j);
  const std::size_t dim = psi.dim();
  Eigen::Matrix4cd g = gate;
  Eigen::Vector4cd v;
  for (std::size_t a = 0; a < dim; ++a) {
    if (a & (mi | mj)) continue;  // visit each 4-dim orbit once, at its 00 member
    const std::size_t i00 = a, i01 = a | mj, i10 = a | mi, i11 = a | mi | mj;
    v << psi.amplitudes(i00), psi.amplitudes(i01), psi.amplitudes(i10), psi.amplitudes(i11);
    v = g * v;
    psi.amplitudes(i00) = v(0);
    psi.amplitudes(i01) = v(1);
    psi.amplitudes(i10) = v(2);
    psi.amplitudes(i11) = v(3);
  }
}

inline StateVector apply_two_qubit_gate(StateVector state, const ComplexMatrix& gate,
                                        int i, int j) {
  apply_two_qubit_gate_in_place(state, gate, i, j);
  return state;
}

/// Partial trace onto the qubits listed in `keep` (their order defines the
/// tensor order of the result).
inline DensityMatrix reduced_density_matrix(const StateVector& psi,
                                            const std::vector<int>& keep) {
  if (keep.empty()) throw ValidationError("reduced_density_matrix: keep set is empty");
  for (int q : keep) detail::check_qubit_index(psi, q, "reduced_density_matrix");
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = a + 1; b < keep.size(); ++b)
      if (keep[a] == keep[b])
        throw ValidationError("reduced_density_matrix: duplicate qubit index in keep set");

  const int n = psi.n_qubits;
  const int nk = static_cast<int>(keep.size());
  const int nr = n - nk;

  std::vector<std::size_t> keep_mask(nk);
  for (int t = 0; t < nk; ++t) keep_mask[t] = psi.qubit_mask(keep[t]);

  std::vector<std::size_t> rest_mask;
  rest_mask.reserve(nr);
  for (int q = 0; q < n; ++q) {
    bool kept = false;
    for (int t = 0; t < nk; ++t) kept = kept || (keep[t] == q);
    if (!kept) rest_mask.push_back(psi.qubit_mask(q));
  }

  const std::size_t kd = std::size_t{1} << nk;
  const std::size_t rd = std::size_t{1} << nr;

  // Precompute the kept-qubit part of the amplitude index for each row value.
  std::vector<std::size_t> row_bits(kd, 0);
  for (std::size_t r = 0; r < kd; ++r)
    for (int t = 0; t < nk; ++t)
      if ((r >> (nk - 1 - t)) & 1) row_bits[r] |= keep_mask[t];

  DensityMatrix rho = DensityMatrix::Zero(kd, kd);
  Eigen::VectorXcd v(kd);
  for (std::size_t rest = 0; rest < rd; ++rest) {
    std::size_t base = 0;
    for (int t = 0; t < nr; ++t)
      if ((rest >> (nr - 1 - t)) & 1) base |= rest_mask[t];
    for (std::size_t r = 0; r < kd; ++r) v(r) = psi.amplitudes(base | row_bits[r]);
    rho.noalias() += v * v.adjoint();
  }
  return rho;
}

/// -tr(rho ln rho) in nats, with eigenvalues below 1e-12 clamped to zero
/// before the logarithm.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  if (rho.rows() != rho.cols()) throw ValidationError("von_neumann_entropy: matrix not square");
  const double defect = hermiticity_defect(rho);
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "von_neumann_entropy: matrix not Hermitian, max asymmetry " << defect;
    throw ValidationError(os.str());
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > tol::trace) {
    std::ostringstream os;
    os << "von_neumann_entropy: trace " << tr << " deviates from 1 beyond tolerance";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam < tol::eigenvalue_floor) {
      std::ostringstream os;
      os << "von_neumann_entropy: eigenvalue " << lam << " below validity floor";
      throw ValidationError(os.str());
    }
    if (lam < tol::entropy_clamp) continue;
    s -= lam * std::log(lam);
  }
  return s < 0.0 ? 0.0 : s;
}

/// I(i:j) = S(rho_i) + S(rho_j) - S(rho_ij), in nats. The joint entropy is
/// computed, never assumed zero.
inline double mutual_information(const StateVector& psi, int i, int j) {
  if (i == j) throw ValidationError("mutual_information: qubit indices must differ");
  const double si = von_neumann_entropy(reduced_density_matrix(psi, {i}));
  const double sj = von_neumann_entropy(reduced_density_matrix(psi, {j}));
  const double sij = von_neumann_entropy(reduced_density_matrix(psi, {i, j}));
  return si + sj - sij;
}

}  // namespace colsim
