#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmarkov/ergodic.hpp"

namespace qmarkov {

/// Numeric evidence behind an IdempotentStructure. Every entry is a residual
/// that should vanish, except the two Choi minima and the faithfulness margin
/// which should be non-negative (resp. positive).
struct IdempotentChecks {
  double idempotent = 0.0;       // ||P o P - P||
  double q_corner = 0.0;         // ||Q - L_R Q L_R||
  double q_idempotent = 0.0;     // ||Q o Q - Q||
  double q_unital = 0.0;         // ||Q(p_R) - p_R||
  double q_choi_min = 0.0;       // min eig of the corner Choi matrix of Q
  double q_faithful_min = 0.0;   // min eig of Q_*(p_R / r) on the corner
  double s_unital = 0.0;         // ||S(p_R) - p_Tr||
  double s_support = 0.0;        // ||S - L_Tr S|| on the range of Q
  double s_choi_min = 0.0;       // min eig of the Choi matrix of S o Q on the corner
  double reconstruction = 0.0;   // ||P - (Q + S Q) L_R||
  double transient_image = 0.0;  // ||P(p_Tr)||
  double compression = 0.0;      // ||P - P L_R||
  double range_split = 0.0;      // ||P(x) - p_R P(x) p_R - p_Tr P(x) p_Tr|| over a basis
  double corner_identity = 0.0;  // ||P(x) - x - S(x)|| over the range basis of Q
};

/// P(x) = Q(p_R x p_R) + S(Q(p_R x p_R)).
///
/// Q and S are stored as d^2 x d^2 superoperators. Q lives on the corner
/// p_R M_d p_R; S is kept in the canonical form L_Tr P L_R, which agrees
/// with the abstract S on the range of Q. S is empty when p_R = 1.
struct IdempotentStructure {
  Mat channel;
  Projection p_R;
  Projection p_Tr;
  Mat Q;
  std::optional<Mat> S;
  std::vector<Mat> q_range_basis;
  IdempotentChecks checks;
};

struct ChoiEffrosAlgebra {
  /// Orthonormal Hermitian basis b_k of P(M_d).
  std::vector<Mat> basis;
  /// structure[k](i, j) = coefficient of b_k in b_i <> b_j = P(b_i b_j).
  std::vector<Mat> structure;
  /// Coordinates of the unit P(1) = 1.
  Vec unit;
  double unit_residual = 0.0;
  double associativity = 0.0;   // max over basis triples
  double involution = 0.0;      // ||(x<>y)* - y*<>x*||
  double intertwining = 0.0;    // ||c(x<>y) - c(x)c(y)||, c = compression by p_R
  double product_formula = 0.0; // ||x<>y - (x_Q y_Q + S(x_Q y_Q))||
  double cstar_identity = 0.0;  // | ||c(x*<>x)|| - ||c(x)||^2 |

  /// x <> y for elements given in coordinates.
  Vec multiply(const Vec& x, const Vec& y) const;
  Mat element(const Vec& coords) const;
};

struct CondExpReport {
  bool homomorphism = false;
  bool closed = false;
  double homomorphism_residual = 0.0;  // S(xy) - S(x)S(y), S(x*) - S(x)*
  double closure_residual = 0.0;       // distance of b_i b_j from range(P)
};

bool is_idempotent(const QuantumChannel& t, const Tolerances& tol = {});

/// Throws NotIdempotent, or InvariantViolation if the computed structure
/// fails its own checks.
IdempotentStructure decompose(const QuantumChannel& p, const Tolerances& tol = {});

/// Throws InvalidComponents naming the first violated invariant.
QuantumChannel reconstruct(const Projection& p_R, const Mat& q, const std::optional<Mat>& s,
                           const Tolerances& tol = {});

/// Both tests of the conditional expectation property. Throws NotIdempotent.
CondExpReport conditional_expectation_report(const QuantumChannel& p, const Tolerances& tol = {});
/// Throws NotIdempotent, or CrossCheckMismatch when the homomorphism test
/// on S and the closure test on range(P) disagree.
bool is_conditional_expectation(const QuantumChannel& p, const Tolerances& tol = {});

/// Throws NotIdempotent.
ChoiEffrosAlgebra choi_effros(const QuantumChannel& p, const Tolerances& tol = {});

/// Hermitian basis of the range of a superoperator (images of matrix units).
std::vector<Mat> range_basis(const Mat& super, int d, const Tolerances& tol = {});

}  // namespace qmarkov
