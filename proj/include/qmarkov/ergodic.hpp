#pragma once

#include <optional>
#include <vector>

#include "qmarkov/channel.hpp"
#include "qmarkov/core.hpp"

namespace qmarkov {

/// Orthonormal Hermitian basis of Fix T = {x : T(x) = x}.
struct FixedSpace {
  std::vector<Mat> basis;
  int dim() const { return static_cast<int>(basis.size()); }
};

enum class ErgodicMethod {
  /// Spectral projection onto the eigenvalue-1 eigenspace of the superoperator.
  Spectral,
  /// Cesaro means S_N = (1/N) sum_{n<N} T^n built by doubling, then
  /// squared until idempotent. Independent of any eigen/SVD solver.
  Cesaro,
};

/// Idempotent Markov operator P with TP = PT = P = P^2 and P(A) = Fix T.
struct ErgodicProjection {
  Mat super;
  ErgodicMethod method = ErgodicMethod::Spectral;
  /// Cesaro route only: number of averaged powers and squarings used.
  long long cesaro_terms = 0;
  int squarings = 0;

  Mat apply(const Mat& x) const { return apply_super(super, x); }
};

struct PeripheralCluster {
  cplx eigenvalue;
  int multiplicity = 0;
  /// Spectral projection of the superoperator for this eigenvalue.
  Mat projector;
};

struct StationaryStates {
  /// Hermitian basis of the fixed space of the pre-adjoint.
  std::vector<Mat> basis;
  /// P_*(1/d); its support dominates the support of every stationary state.
  Mat maximal;
};

/// p_R + p_Tr + p_R0 = 1, with p_R0 = 0 in finite dimension.
struct RecurrenceSplit {
  Projection p_R;
  Projection p_Tr;
  Projection p_R0;
  /// min eig(T(p_R) - p_R): non-negative up to rounding (p_R subharmonic).
  double subharmonic_margin = 0.0;
  /// min eig(p_Tr - T(p_Tr)): non-negative up to rounding (p_Tr superharmonic).
  double superharmonic_margin = 0.0;
  double sum_residual = 0.0;
};

/// a = y + h with y a potential, h = P(a) fixed, charge x = y - T(y).
struct RieszDecomposition {
  Mat input;
  Mat potential;
  Mat harmonic;
  Mat charge;
  double sum_residual = 0.0;        // ||a - y - h||
  double fixed_residual = 0.0;      // ||T(h) - h||
  double charge_min_eigenvalue = 0.0;
  double potential_decay = 0.0;     // ||P_peripheral(y)||
};

/// All spectral data of one channel needed by the recurrence analyses,
/// computed once. Immutable after construction.
class ErgodicAnalysis {
 public:
  /// Validates `t` (require_markov), then computes the ergodic projection,
  /// the peripheral clusters, the maximal stationary state and the
  /// recurrence split. Throws NonSemisimpleUnitEigenvalue or
  /// InvariantViolation on numerical breakdown.
  explicit ErgodicAnalysis(const QuantumChannel& t, const Tolerances& tol = {});

  const QuantumChannel& channel() const { return channel_; }
  const Tolerances& tolerances() const { return tol_; }
  int dim() const { return channel_.dim(); }

  const ErgodicProjection& ergodic() const { return ergodic_; }
  const std::vector<PeripheralCluster>& peripheral() const { return peripheral_; }
  /// Sum of the peripheral cluster projectors.
  const Mat& peripheral_projector() const { return peripheral_projector_; }
  const RecurrenceSplit& split() const { return split_; }
  const Mat& maximal_stationary() const { return maximal_stationary_; }

  Mat apply(const Mat& x) const { return channel_.apply(x); }
  Mat apply_ergodic(const Mat& x) const { return ergodic_.apply(x); }
  Mat apply_peripheral(const Mat& x) const { return apply_super(peripheral_projector_, x); }

  /// Solves (1 - T) y = x on the complement of the peripheral spectral
  /// subspace: y = (1 - T + P_per)^{-1} x. Equals sum T^n(x) whenever
  /// P_per(x) = 0; no summability check.
  Mat solve_potential(const Mat& x) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  QuantumChannel channel_;
  Tolerances tol_;
  ErgodicProjection ergodic_;
  std::vector<PeripheralCluster> peripheral_;
  Mat peripheral_projector_;
  Mat maximal_stationary_;
  RecurrenceSplit split_;
  Eigen::PartialPivLU<Mat> potential_solver_;
  std::vector<std::string> warnings_;
};

/// Spectral projection of `super` for the (semisimple) eigenvalue `lambda`,
/// with multiplicity read off the singular values of (super - lambda).
/// Throws NonSemisimpleUnitEigenvalue if left/right eigenspaces pair singularly.
PeripheralCluster spectral_cluster(const Mat& super, cplx lambda, const Tolerances& tol);

FixedSpace fixed_space(const QuantumChannel& t, const Tolerances& tol = {});
ErgodicProjection ergodic_projection(const QuantumChannel& t, const Tolerances& tol = {},
                                     ErgodicMethod method = ErgodicMethod::Spectral);
StationaryStates stationary_states(const QuantumChannel& t, const Tolerances& tol = {});
RecurrenceSplit recurrence_split(const QuantumChannel& t, const Tolerances& tol = {});

/// y = sum_n T^n(x). Throws NotPsd, or NotSummable naming the peripheral
/// eigenvalue whose spectral projection does not annihilate x.
Mat potential_sum(const ErgodicAnalysis& an, const Mat& x);
Mat potential_sum(const QuantumChannel& t, const Mat& x, const Tolerances& tol = {});

/// Throws NotSuperharmonic with a witness eigenvector of T(a) - a.
RieszDecomposition riesz_decompose(const ErgodicAnalysis& an, const Mat& a,
                                   ErgodicMethod method = ErgodicMethod::Spectral);
RieszDecomposition riesz_decompose(const QuantumChannel& t, const Mat& a, const Tolerances& tol = {},
                                   ErgodicMethod method = ErgodicMethod::Spectral);

/// Potential criterion: T(y) <= y and the peripheral projection kills y.
bool is_potential(const ErgodicAnalysis& an, const Mat& y);

/// Lift of a potential for T^N to the potential sum_{k<N} T^k(y) for T.
/// Throws NotPotentialForPower if y is not a potential for T^N.
Mat power_potential_lift(const QuantumChannel& t, int n, const Mat& y, const Tolerances& tol = {});

}  // namespace qmarkov
