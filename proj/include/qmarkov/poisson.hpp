#pragma once

#include <vector>

#include "qmarkov/ergodic.hpp"

namespace qmarkov {

struct WmeReport {
  double ergodic_unit_residual = 0.0;  // ||P(p_R) - 1||
  int fixed_dim = 0;
  int compression_rank = 0;            // numerical rank of x -> p_R x p_R on Fix T
  double compression_min_singular = 0.0;
  bool unit_ok = false;
  bool injective = false;
  bool transient_potential = false;    // p_Tr is a potential
  bool passed() const { return unit_ok && injective && transient_potential; }
};

struct PoissonBoundary {
  Projection p_R;
  /// Orthonormal Hermitian basis b_k of p_R Fix T p_R.
  std::vector<Mat> compressed_basis;
  /// J(b_k) = P(b_k).
  std::vector<Mat> j_table;
  /// structure[k](i, j) = coefficient of b_k in b_i b_j.
  std::vector<Mat> structure;
  double closure_residual = 0.0;       // b_i b_j outside the span
  double intertwining_residual = 0.0;  // ||J(b_i b_j) - J(b_i) <> J(b_j)||
  double fixed_residual = 0.0;         // ||T(J(b)) - J(b)||
  double left_inverse_residual = 0.0;  // ||p_R J(b) p_R - b||
  double split_residual = 0.0;         // ||J(b) - b - S(b)||
};

/// Report only; never throws for a valid channel.
WmeReport verify_wme(const ErgodicAnalysis& an);
WmeReport verify_wme(const QuantumChannel& t, const Tolerances& tol = {});

/// Throws CrossCheckMismatch when the compressed fixed space and the fixed
/// space of x -> p_R T(x) p_R on the corner differ.
std::vector<Mat> compressed_fixed_algebra(const ErgodicAnalysis& an);
std::vector<Mat> compressed_fixed_algebra(const QuantumChannel& t, const Tolerances& tol = {});

/// P(x) for x in p_R Fix T p_R. Throws NotInCompressedAlgebra.
Mat poisson_integral(const ErgodicAnalysis& an, const Mat& x);
Mat poisson_integral(const QuantumChannel& t, const Mat& x, const Tolerances& tol = {});

/// Throws InvariantViolation if closure or intertwining fail.
PoissonBoundary poisson_boundary(const ErgodicAnalysis& an);
PoissonBoundary poisson_boundary(const QuantumChannel& t, const Tolerances& tol = {});

}  // namespace qmarkov
