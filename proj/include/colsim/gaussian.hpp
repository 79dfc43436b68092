#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

#include "colsim/errors.hpp"
#include "colsim/qubit.hpp"  // CirculantGraphSpec, ring_distance

namespace colsim {

/// 2x2 block of quadrature second moments (hbar = 1, vacuum = I/2).
using CovarianceBlock = Eigen::Matrix2d;

inline CovarianceBlock vacuum_block() { return CovarianceBlock::Identity() * 0.5; }

/// Thermal state with Bose-Einstein occupation N: (N + 1/2) I.
inline CovarianceBlock thermal_block(double occupation) {
  return CovarianceBlock::Identity() * (occupation + 0.5);
}

inline double symmetry_defect(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline Eigen::Matrix2d symmetrized(const Eigen::Matrix2d& z) {
  return 0.5 * (z + z.transpose());
}

/// Symplectic form: direct sum of [[0,1],[-1,0]] per mode.
inline Eigen::MatrixXd omega_matrix(int n_modes) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    w(2 * m, 2 * m + 1) = 1.0;
    w(2 * m + 1, 2 * m) = -1.0;
  }
  return w;
}

/// Covariance matrix of the system + ancilla register in 2x2 block layout,
/// block 0 = system, blocks 1..N_A = ancillas in collision order.
struct EnsembleCM {
  int n_ancillas = 0;
  Eigen::MatrixXd mat;

  static EnsembleCM zero(int n_ancillas) {
    if (n_ancillas < 1) throw ValidationError("EnsembleCM: n_ancillas must be positive");
    EnsembleCM g;
    g.n_ancillas = n_ancillas;
    g.mat = Eigen::MatrixXd::Zero(2 * (n_ancillas + 1), 2 * (n_ancillas + 1));
    return g;
  }

  int dim() const { return 2 * (n_ancillas + 1); }
  int n_modes() const { return n_ancillas + 1; }

  CovarianceBlock block(int bi, int bj) const { return mat.block<2, 2>(2 * bi, 2 * bj); }
  void set_block(int bi, int bj, const CovarianceBlock& b) { mat.block<2, 2>(2 * bi, 2 * bj) = b; }
  CovarianceBlock system_block() const { return block(0, 0); }

  /// In-place beam-splitter collision between the system and ancilla
  /// `target`; touches only the four affected row/column strips, O(dim).
  void collide(double tau, int target) {
    if (target < 1 || target > n_ancillas)
      throw ValidationError("EnsembleCM::collide: target ancilla out of range");
    const double c = std::cos(tau), s = std::sin(tau);
    const int t = 2 * target;
    const Eigen::Matrix<double, 2, Eigen::Dynamic> sys_rows = mat.middleRows<2>(0);
    mat.middleRows<2>(0) = c * sys_rows + s * mat.middleRows<2>(t);
    mat.middleRows<2>(t) = -s * sys_rows + c * mat.middleRows<2>(t);
    const Eigen::Matrix<double, Eigen::Dynamic, 2> sys_cols = mat.middleCols<2>(0);
    mat.middleCols<2>(0) = c * sys_cols + s * mat.middleCols<2>(t);
    mat.middleCols<2>(t) = -s * sys_cols + c * mat.middleCols<2>(t);
  }
};

/// Beam-splitter symplectic matrix coupling the system block with ancilla
/// `target`: [[c, s], [-s, c]] on the two blocks, identity elsewhere.
inline Eigen::MatrixXd beam_splitter_symplectic(double tau, int target, int n_ancillas) {
  if (target < 1 || target > n_ancillas)
    throw ValidationError("beam_splitter_symplectic: target ancilla out of range");
  const int dim = 2 * (n_ancillas + 1);
  const double c = std::cos(tau), s = std::sin(tau);
  Eigen::MatrixXd sp = Eigen::MatrixXd::Identity(dim, dim);
  const int t = 2 * target;
  sp.block<2, 2>(0, 0) = c * Eigen::Matrix2d::Identity();
  sp.block<2, 2>(0, t) = s * Eigen::Matrix2d::Identity();
  sp.block<2, 2>(t, 0) = -s * Eigen::Matrix2d::Identity();
  sp.block<2, 2>(t, t) = c * Eigen::Matrix2d::Identity();
  return sp;
}

/// One step of covariance-matrix dynamics: S gamma S^T.
inline EnsembleCM step_covariance(const EnsembleCM& gamma, const Eigen::MatrixXd& sp) {
  if (sp.rows() != gamma.dim() || sp.cols() != gamma.dim())
    throw ValidationError("step_covariance: symplectic matrix dimension mismatch");
  EnsembleCM out = gamma;
  out.mat = sp * gamma.mat * sp.transpose();
  out.mat = 0.5 * (out.mat + out.mat.transpose()).eval();
  return out;
}

// ---------------------------------------------------------------------------
// Correlation laws
// ---------------------------------------------------------------------------

/// zeta_d given as an explicit list, zetas[0] being distance 1; zero beyond.
struct ExplicitCorrelations {
  std::vector<Eigen::Matrix2d> zetas;
};

/// zeta_1 = zeta, zero beyond.
struct NearestNeighborCorrelations {
  Eigen::Matrix2d zeta;
};

/// zeta_d = K^{1-d} zeta with decay constant K > 1.
struct AlgebraicCorrelations {
  Eigen::Matrix2d zeta;
  double decay = 2.0;
};

/// zeta_d taken from the cyclic Gaussian graph state of `spec`.
struct GraphCorrelations {
  CirculantGraphSpec spec;
};

using CorrelationLaw = std::variant<ExplicitCorrelations, NearestNeighborCorrelations,
                                    AlgebraicCorrelations, GraphCorrelations>;

inline std::vector<double> circulant_eigenvalues(const CirculantGraphSpec& spec);
inline CovarianceBlock circulant_correlations(const CirculantGraphSpec& spec, int d);

inline void validate_law(const CorrelationLaw& law) {
  if (const auto* alg = std::get_if<AlgebraicCorrelations>(&law)) {
    if (!(alg->decay > 1.0)) {
      std::ostringstream os;
      os << "AlgebraicCorrelations: decay constant K = " << alg->decay << " must exceed 1";
      throw ValidationError(os.str());
    }
  } else if (const auto* gr = std::get_if<GraphCorrelations>(&law)) {
    validate_graph_spec(gr->spec);
  }
}

/// Correlation block at collision distance d >= 1. User-supplied blocks are
/// symmetrized; graph-law blocks are diagonal already.
inline CovarianceBlock law_zeta(const CorrelationLaw& law, int d) {
  if (d < 1) throw ValidationError("law_zeta: distance must be >= 1");
  if (const auto* ex = std::get_if<ExplicitCorrelations>(&law)) {
    if (d <= static_cast<int>(ex->zetas.size())) return symmetrized(ex->zetas[d - 1]);
    return CovarianceBlock::Zero();
  }
  if (const auto* nn = std::get_if<NearestNeighborCorrelations>(&law)) {
    if (d == 1) return symmetrized(nn->zeta);
    return CovarianceBlock::Zero();
  }
  if (const auto* alg = std::get_if<AlgebraicCorrelations>(&law)) {
    return std::pow(alg->decay, 1.0 - d) * symmetrized(alg->zeta);
  }
  const auto& gr = std::get<GraphCorrelations>(law);
  return circulant_correlations(gr.spec, d);
}

/// Correlation block between register slots at |i-j| = d on a ring of
/// n_ancillas sites (distances wrap: d and n_ancillas - d coincide).
inline CovarianceBlock ring_zeta(const CorrelationLaw& law, int d, int n_ancillas) {
  if (d < 1 || d > n_ancillas - 1) throw ValidationError("ring_zeta: distance out of range");
  return law_zeta(law, std::min(d, n_ancillas - d));
}

// ---------------------------------------------------------------------------
// Physicality
// ---------------------------------------------------------------------------

struct PhysicalityReport {
  double min_bonafide_eigenvalue = 0.0;            // min eig of gamma + i Omega / 2
  std::vector<double> symplectic_eigenvalues;      // ascending
  bool physical = false;                           // min eig >= -1e-8
};

inline constexpr double bonafide_threshold = -1e-8;

inline double min_bonafide_eigenvalue(const Eigen::MatrixXd& gamma) {
  const int n_modes = static_cast<int>(gamma.rows()) / 2;
  Eigen::MatrixXcd h = gamma.cast<Complex>() + Complex(0.0, 0.5) * omega_matrix(n_modes).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Bona-fide Gaussian state check: gamma + i Omega / 2 >= 0 and the
/// symplectic spectrum (eigenvalues of |i Omega gamma|, computed through the
/// Hermitian form gamma^{1/2} (i Omega) gamma^{1/2}).
inline PhysicalityReport physicality_check(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0)
    throw ValidationError("physicality_check: matrix must be square with even dimension");
  if (symmetry_defect(gamma) > 1e-10) {
    std::ostringstream os;
    os << "physicality_check: input not symmetric, defect " << symmetry_defect(gamma);
    throw ValidationError(os.str());
  }
  const int n_modes = static_cast<int>(gamma.rows()) / 2;

  PhysicalityReport report;
  report.min_bonafide_eigenvalue = min_bonafide_eigenvalue(gamma);
  report.physical = report.min_bonafide_eigenvalue >= bonafide_threshold;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma);
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd root = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXcd w =
      Complex(0.0, 1.0) * (root * omega_matrix(n_modes) * root).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esw(w, Eigen::EigenvaluesOnly);
  // Spectrum is symmetric around zero; the top n_modes values are the
  // symplectic eigenvalues.
  std::vector<double> nu;
  for (Eigen::Index i = esw.eigenvalues().size() - n_modes; i < esw.eigenvalues().size(); ++i)
    nu.push_back(esw.eigenvalues()(i));
  report.symplectic_eigenvalues = std::move(nu);
  return report;
}

inline PhysicalityReport physicality_check(const EnsembleCM& gamma) {
  return physicality_check(gamma.mat);
}

inline PhysicalityReport physicality_check(const CovarianceBlock& gamma) {
  return physicality_check(Eigen::MatrixXd(gamma));
}

// ---------------------------------------------------------------------------
// Ensemble construction
// ---------------------------------------------------------------------------

/// Assembles the initial register CM: uncorrelated system block, ancilla
/// sector Toeplitz with ring-indexed correlations. Throws PhysicalityError
/// if the result is not a bona fide Gaussian state.
inline EnsembleCM build_ensemble_cm(const CovarianceBlock& gamma_s0,
                                    const CovarianceBlock& gamma_a, const CorrelationLaw& law,
                                    int n_ancillas) {
  if (symmetry_defect(gamma_s0) > 1e-12 || symmetry_defect(gamma_a) > 1e-12)
    throw ValidationError("build_ensemble_cm: covariance blocks must be symmetric");
  validate_law(law);
  EnsembleCM gamma = EnsembleCM::zero(n_ancillas);
  gamma.set_block(0, 0, gamma_s0);

  std::vector<CovarianceBlock> zeta(n_ancillas);  // zeta[d], d = 1..n_ancillas-1
  for (int d = 1; d <= n_ancillas - 1; ++d) zeta[d] = ring_zeta(law, d, n_ancillas);

  for (int i = 1; i <= n_ancillas; ++i) {
    gamma.set_block(i, i, gamma_a);
    for (int j = i + 1; j <= n_ancillas; ++j) {
      gamma.set_block(i, j, zeta[j - i]);
      gamma.set_block(j, i, zeta[j - i].transpose());
    }
  }

  // Fast definiteness probe; full spectrum only on failure.
  Eigen::MatrixXcd h = gamma.mat.cast<Complex>() +
                       Complex(0.0, 0.5) * omega_matrix(gamma.n_modes()).cast<Complex>();
  h.diagonal().array() += -bonafide_threshold;
  Eigen::LLT<Eigen::MatrixXcd> llt(h);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "build_ensemble_cm: state not bona fide, most negative eigenvalue of "
          "gamma + i Omega/2 is "
       << min_bonafide_eigenvalue(gamma.mat);
    throw PhysicalityError(os.str());
  }
  return gamma;
}

struct GaussianRun {
  std::vector<CovarianceBlock> system_blocks;  // [n] = after n collisions
  EnsembleCM final_cm;
};

/// Sequential beam-splitter collisions with ancillas 1..n_collisions.
inline GaussianRun run_gaussian_collisions(EnsembleCM gamma, double tau, int n_collisions) {
  if (n_collisions < 0 || n_collisions > gamma.n_ancillas)
    throw ValidationError("run_gaussian_collisions: n_collisions outside [0, N_A]");
  GaussianRun run;
  run.system_blocks.reserve(n_collisions + 1);
  run.system_blocks.push_back(gamma.system_block());
  for (int n = 1; n <= n_collisions; ++n) {
    gamma.collide(tau, n);
    run.system_blocks.push_back(gamma.system_block());
  }
  run.final_cm = std::move(gamma);
  return run;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// System CM after n collisions for translationally invariant ancillas:
///   c^{2n} gamma_S^0 + (1 - c^{2n}) gamma_A
///   + 2 s^2 sum_{m=1}^{n-1} c^{2m} sum_{d=1}^{m} c^{-d} zeta_d.
/// The double sum is evaluated through the stable recursion
/// partial_m = c partial_{m-1} + zeta_m, term_m = c^m partial_m, which never
/// forms the growing factor c^{-d}.
inline CovarianceBlock closed_form_cm(int n, const CovarianceBlock& gamma_s0,
                                      const CovarianceBlock& gamma_a,
                                      const std::function<CovarianceBlock(int)>& zeta, double tau) {
  if (n < 0) throw ValidationError("closed_form_cm: n must be >= 0");
  const double c = std::cos(tau);
  const double s2 = std::sin(tau) * std::sin(tau);
  const double c2n = std::pow(c * c, n);
  CovarianceBlock corr = CovarianceBlock::Zero();
  CovarianceBlock partial = CovarianceBlock::Zero();
  double cm = 1.0;
  for (int m = 1; m <= n - 1; ++m) {
    cm *= c;
    partial = c * partial + zeta(m);
    corr += cm * partial;
  }
  return c2n * gamma_s0 + (1.0 - c2n) * gamma_a + 2.0 * s2 * corr;
}

inline CovarianceBlock closed_form_cm(int n, const CovarianceBlock& gamma_s0,
                                      const CovarianceBlock& gamma_a, const CorrelationLaw& law,
                                      double tau) {
  validate_law(law);
  return closed_form_cm(n, gamma_s0, gamma_a, [&law](int d) { return law_zeta(law, d); }, tau);
}

/// Closed form for nearest-neighbor correlations only:
///   c^{2n} gamma_S^0 + (1 - c^{2n}) gamma_A + 2 c (1 - c^{2(n-1)}) zeta.
inline CovarianceBlock nn_closed_form(int n, const CovarianceBlock& gamma_s0,
                                      const CovarianceBlock& gamma_a, const Eigen::Matrix2d& zeta,
                                      double tau) {
  if (n < 1) throw ValidationError("nn_closed_form: n must be >= 1");
  const double c = std::cos(tau);
  const double c2n = std::pow(c * c, n);
  const double c2nm1 = std::pow(c * c, n - 1);
  return c2n * gamma_s0 + (1.0 - c2n) * gamma_a + 2.0 * c * (1.0 - c2nm1) * symmetrized(zeta);
}

/// Nearest-neighbor steady state gamma_A + 2 c zeta. Requires 0 < |cos tau| < 1:
/// at c = 0 the correlation term plays no role and at |c| = 1 no limit exists.
inline CovarianceBlock nn_steady_state(const CovarianceBlock& gamma_a,
                                       const Eigen::Matrix2d& zeta, double tau) {
  const double c = std::cos(tau);
  if (c == 0.0 || std::abs(c) >= 1.0) {
    std::ostringstream os;
    os << "nn_steady_state: requires 0 < |cos tau| < 1, got cos tau = " << c;
    throw ValidationError(os.str());
  }
  return gamma_a + 2.0 * c * symmetrized(zeta);
}

/// Steady-state correlation prefactor 2cK/(K - c) for algebraically decaying
/// correlations; zero at tau = pi/2, negative for tau in (pi/2, 3pi/2).
inline double algebraic_prefactor(double decay, double tau) {
  if (!(decay > 1.0)) throw ValidationError("algebraic_prefactor: K must exceed 1");
  const double c = std::cos(tau);
  return 2.0 * c * decay / (decay - c);
}

/// Closed form for zeta_d = K^{1-d} zeta. The generic expression
///   c^{2n} gamma_S^0 + (1-c^{2n}) gamma_A
///   + (2Ks^2/(cK-1)) [ (c^2 - c^{2n})/s^2 - (c^{n-1}K^{1-n} - 1)/(1 - K/c) ] zeta
/// has removable singularities at s = 0 and cK = 1, where the summed form is
/// used instead.
inline CovarianceBlock algebraic_closed_form(int n, const CovarianceBlock& gamma_s0,
                                             const CovarianceBlock& gamma_a,
                                             const Eigen::Matrix2d& zeta, double decay,
                                             double tau) {
  if (!(decay > 1.0)) throw ValidationError("algebraic_closed_form: K must exceed 1");
  if (n < 1) throw ValidationError("algebraic_closed_form: n must be >= 1");
  const double c = std::cos(tau);
  const double s2 = std::sin(tau) * std::sin(tau);
  const Eigen::Matrix2d zs = symmetrized(zeta);
  if (s2 < 1e-12 || std::abs(c * decay - 1.0) < 1e-8 || std::abs(c) < 1e-14) {
    return closed_form_cm(
        n, gamma_s0, gamma_a,
        [&](int d) -> CovarianceBlock { return std::pow(decay, 1.0 - d) * zs; }, tau);
  }
  const double c2n = std::pow(c * c, n);
  const double geom_c = (c * c - c2n) / s2;
  const double geom_k = (std::pow(c, n - 1) * std::pow(decay, 1.0 - n) - 1.0) / (1.0 - decay / c);
  const double weight = 2.0 * decay * s2 / (c * decay - 1.0) * (geom_c - geom_k);
  return c2n * gamma_s0 + (1.0 - c2n) * gamma_a + weight * zs;
}

/// n -> infinity limit of algebraic_closed_form: gamma_A + [2cK/(K-c)] zeta.
inline CovarianceBlock algebraic_steady_state(const CovarianceBlock& gamma_a,
                                              const Eigen::Matrix2d& zeta, double decay,
                                              double tau) {
  if (std::abs(std::cos(tau)) >= 1.0)
    throw ValidationError("algebraic_steady_state: requires |cos tau| < 1");
  return gamma_a + algebraic_prefactor(decay, tau) * symmetrized(zeta);
}

struct SteadyStateResult {
  CovarianceBlock value;
  bool truncation_warning = false;  // set when zeta_d has not decayed by d_max
};

/// Steady state for a generic correlation law, gamma_A + 2 sum_d c^d zeta_d
/// truncated at d_max (geometric resummation of the double sum with m summed
/// before d).
inline SteadyStateResult general_steady_state(const CovarianceBlock& gamma_a,
                                              const CorrelationLaw& law, double tau, int d_max) {
  validate_law(law);
  if (d_max < 1) throw ValidationError("general_steady_state: d_max must be >= 1");
  const double c = std::cos(tau);
  if (std::abs(c) >= 1.0)
    throw ValidationError("general_steady_state: requires |cos tau| < 1");
  CovarianceBlock sum = CovarianceBlock::Zero();
  double cd = 1.0;
  CovarianceBlock last_term = CovarianceBlock::Zero();
  for (int d = 1; d <= d_max; ++d) {
    cd *= c;
    last_term = cd * law_zeta(law, d);
    sum += last_term;
  }
  SteadyStateResult result;
  result.value = gamma_a + 2.0 * sum;
  const double scale = std::max(1.0, result.value.cwiseAbs().maxCoeff());
  result.truncation_warning = last_term.cwiseAbs().maxCoeff() > 1e-12 * scale;
  return result;
}

/// Broken-homogenization term: Delta gamma_S^n =
/// 2 s^2 sum_{m=1}^{n-1} c^{2m} sum_{d=1}^{m} c^{-d} zeta_d, i.e. the closed
/// form minus the zeta = 0 mixture.
inline CovarianceBlock homogenization_gap(int n, const std::function<CovarianceBlock(int)>& zeta,
                                          double tau) {
  if (n < 1) throw ValidationError("homogenization_gap: n must be >= 1");
  return closed_form_cm(n, CovarianceBlock::Zero(), CovarianceBlock::Zero(), zeta, tau);
}

inline CovarianceBlock homogenization_gap(int n, const CorrelationLaw& law, double tau) {
  validate_law(law);
  return homogenization_gap(n, [&law](int d) { return law_zeta(law, d); }, tau);
}

// ---------------------------------------------------------------------------
// Gaussian graph states
// ---------------------------------------------------------------------------

/// Weighted graph driving the two-mode-squeezing preparation; the state is
/// fixed by M = exp(adjacency * strength).
struct GaussianGraphSpec {
  Eigen::MatrixXd adjacency;
  double strength = 0.0;

  static GaussianGraphSpec from_circulant(const CirculantGraphSpec& spec) {
    return GaussianGraphSpec{build_circulant_adjacency(spec), spec.strength};
  }
};

inline void validate_gaussian_graph(const GaussianGraphSpec& spec) {
  if (spec.adjacency.rows() != spec.adjacency.cols())
    throw ValidationError("GaussianGraphSpec: adjacency must be square");
  if (symmetry_defect(spec.adjacency) > 1e-12)
    throw ValidationError("GaussianGraphSpec: adjacency must be symmetric");
  if (spec.adjacency.diagonal().cwiseAbs().maxCoeff() > 0.0)
    throw ValidationError("GaussianGraphSpec: adjacency must have zero diagonal");
  if (!std::isfinite(spec.strength))
    throw ValidationError("GaussianGraphSpec: strength must be finite");
}

/// Position and momentum second moments of a Gaussian graph state:
/// qq = <q_i q_j> = (MM^T)_{ij}/2, pp = <p_i p_j> = [(M^T M)^{-1}]_{ij}/2,
/// <q_i p_j> = 0.
struct GraphBlocks {
  Eigen::MatrixXd qq;
  Eigen::MatrixXd pp;

  int n_modes() const { return static_cast<int>(qq.rows()); }

  CovarianceBlock site_block(int i) const {
    CovarianceBlock b = CovarianceBlock::Zero();
    b(0, 0) = qq(i, i);
    b(1, 1) = pp(i, i);
    return b;
  }

  CovarianceBlock pair_block(int i, int j) const {
    CovarianceBlock b = CovarianceBlock::Zero();
    b(0, 0) = qq(i, j);
    b(1, 1) = pp(i, j);
    return b;
  }

  /// Full register CM in interleaved (q_1, p_1, q_2, p_2, ...) layout.
  Eigen::MatrixXd register_cm() const {
    const int n = n_modes();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        g(2 * i, 2 * j) = qq(i, j);
        g(2 * i + 1, 2 * j + 1) = pp(i, j);
      }
    return g;
  }
};

/// Exact graph-state moments for an arbitrary (not necessarily cyclic)
/// adjacency, via symmetric eigendecomposition: M symmetric makes
/// MM^T = e^{2Gk} and (M^T M)^{-1} = e^{-2Gk}.
inline GraphBlocks graph_cm_general(const GaussianGraphSpec& spec) {
  validate_gaussian_graph(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.adjacency);
  const Eigen::VectorXd& lam = es.eigenvalues();
  Eigen::VectorXd ep(lam.size()), em(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    ep(i) = std::exp(2.0 * spec.strength * lam(i));
    em(i) = std::exp(-2.0 * spec.strength * lam(i));
  }
  GraphBlocks blocks;
  blocks.qq = 0.5 * es.eigenvectors() * ep.asDiagonal() * es.eigenvectors().transpose();
  blocks.pp = 0.5 * es.eigenvectors() * em.asDiagonal() * es.eigenvectors().transpose();
  return blocks;
}

/// Leading-order small-k approximation: site blocks [1/2 + (G^2)_{ii} k^2] I,
/// pair blocks G_{ij} k diag(1, -1).
inline GraphBlocks perturbative_blocks(const GaussianGraphSpec& spec) {
  validate_gaussian_graph(spec);
  const double k = spec.strength;
  const Eigen::MatrixXd& g = spec.adjacency;
  const Eigen::VectorXd site_corr = (g * g).diagonal() * (k * k);
  const int n = static_cast<int>(g.rows());
  GraphBlocks blocks;
  blocks.qq = 0.5 * Eigen::MatrixXd::Identity(n, n) + k * g;
  blocks.pp = 0.5 * Eigen::MatrixXd::Identity(n, n) - k * g;
  blocks.qq += site_corr.asDiagonal();
  blocks.pp += site_corr.asDiagonal();
  return blocks;
}

// ---------------------------------------------------------------------------
// Circulant analytics
// ---------------------------------------------------------------------------

/// Eigenvalues of the circulant adjacency:
/// lambda_m = sum_l 2 c_l cos(2 pi l m / N_A), with the l = N_A/2 term (even
/// N_A) counted once as c_{N_A/2} cos(pi m).
inline std::vector<double> circulant_eigenvalues(const CirculantGraphSpec& spec) {
  validate_graph_spec(spec);
  const int n = spec.n_ancillas;
  std::vector<double> lam(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double v = 0.0;
    for (int l = 1; l <= static_cast<int>(spec.coeffs.size()); ++l) {
      if (2 * l < n)
        v += 2.0 * spec.coeffs[l - 1] * std::cos(2.0 * M_PI * l * m / n);
      else if (2 * l == n)
        v += spec.coeffs[l - 1] * std::cos(M_PI * m);
    }
    lam[m] = v;
  }
  return lam;
}

/// Local graph-state CM on the ring:
/// diag( sum_m e^{2k lambda_m}, sum_m e^{-2k lambda_m} ) / (2 N_A).
inline CovarianceBlock circulant_local_cm(const CirculantGraphSpec& spec) {
  const std::vector<double> lam = circulant_eigenvalues(spec);
  const double k = spec.strength;
  double sq = 0.0, sp = 0.0;
  for (double l : lam) {
    sq += std::exp(2.0 * k * l);
    sp += std::exp(-2.0 * k * l);
  }
  CovarianceBlock b = CovarianceBlock::Zero();
  b(0, 0) = sq / (2.0 * spec.n_ancillas);
  b(1, 1) = sp / (2.0 * spec.n_ancillas);
  return b;
}

/// Graph-state correlations at ring distance d:
/// zeta_d = diag( sum_m cos(2 pi d m/N_A) e^{2k lambda_m},
///                sum_m cos(2 pi d m/N_A) e^{-2k lambda_m} ) / (2 N_A).
/// The imaginary parts of the DFT cancel by the m <-> N_A - m symmetry.
inline CovarianceBlock circulant_correlations(const CirculantGraphSpec& spec, int d) {
  if (d < 1 || d > spec.n_ancillas - 1) {
    std::ostringstream os;
    os << "circulant_correlations: distance " << d << " outside [1, " << spec.n_ancillas - 1
       << "]";
    throw ValidationError(os.str());
  }
  const std::vector<double> lam = circulant_eigenvalues(spec);
  const int n = spec.n_ancillas;
  const double k = spec.strength;
  double sq = 0.0, sp = 0.0;
  for (int m = 0; m < n; ++m) {
    const double w = std::cos(2.0 * M_PI * d * m / n);
    sq += w * std::exp(2.0 * k * lam[m]);
    sp += w * std::exp(-2.0 * k * lam[m]);
  }
  CovarianceBlock b = CovarianceBlock::Zero();
  b(0, 0) = sq / (2.0 * n);
  b(1, 1) = sp / (2.0 * n);
  return b;
}

/// M = e^{Gk} for the circulant graph, assembled from the DFT eigenbasis:
/// M_{j,l} = (1/N_A) sum_m cos(2 pi (j-l) m / N_A) e^{k lambda_m}.
inline Eigen::MatrixXd circulant_exponential(const CirculantGraphSpec& spec) {
  const std::vector<double> lam = circulant_eigenvalues(spec);
  const int n = spec.n_ancillas;
  const double k = spec.strength;
  std::vector<double> first_row(n, 0.0);
  for (int d = 0; d < n; ++d) {
    double v = 0.0;
    for (int m = 0; m < n; ++m) v += std::cos(2.0 * M_PI * d * m / n) * std::exp(k * lam[m]);
    first_row[d] = v / n;
  }
  Eigen::MatrixXd mat(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) mat(j, l) = first_row[(j - l + n) % n];
  return mat;
}

/// Large-ring thermal limit of the nearest-neighbor graph state:
/// gamma_A = I_0(4k)/2 I, with I_0 evaluated as the power series
/// sum_j (2k)^{2j} / (j!)^2.
inline CovarianceBlock nn_bessel_limit(double k) {
  if (std::abs(4.0 * k) > 30.0)
    throw ValidationError("nn_bessel_limit: |4k| > 30 exceeds the series guard");
  const double x2 = (2.0 * k) * (2.0 * k);
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < 1000; ++j) {
    term *= x2 / (static_cast<double>(j) * j);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return CovarianceBlock::Identity() * (0.5 * sum);
}

/// Convenience: full initial register CM with graph-state ancillas.
inline EnsembleCM build_graph_ensemble_cm(const CovarianceBlock& gamma_s0,
                                          const CirculantGraphSpec& spec) {
  return build_ensemble_cm(gamma_s0, circulant_local_cm(spec), GraphCorrelations{spec},
                           spec.n_ancillas);
}

}  // namespace colsim
