#pragma once

#include <vector>

#include "qmarkov/channel.hpp"

namespace qmarkov {

/// Row-stochastic transition matrix of a finite Markov chain.
class StochasticMatrix {
 public:
  /// Throws NotStochastic (negative entry or row sum off by more than
  /// tol.residual).
  static StochasticMatrix from_rows(const RealMat& p, const Tolerances& tol = {});

  int n() const { return static_cast<int>(p_.rows()); }
  const RealMat& matrix() const { return p_; }
  double operator()(int i, int j) const { return p_(i, j); }

 private:
  explicit StochasticMatrix(RealMat p) : p_(std::move(p)) {}
  RealMat p_;
};

enum class StateKind { Transient, PositiveRecurrent };
std::string_view to_string(StateKind k);

struct StateClassification {
  std::vector<StateKind> kind;
  /// Communicating classes, each sorted, in order of smallest member.
  std::vector<std::vector<int>> classes;
  std::vector<bool> closed;
  /// For each closed class, its stationary distribution as a length-n
  /// vector; empty vector for open classes.
  std::vector<RealVec> stationary;

  std::vector<bool> recurrent_mask() const;
};

/// G(f) = sum_k P^k f. Entries flagged infinite carry value 0.
struct GreenFunction {
  RealVec value;
  std::vector<bool> finite;
};

struct ClassicalCrossCheck {
  StateClassification classification;
  std::vector<bool> spectral_recurrent;  // diagonal of the quantum p_R
  double p_R_residual = 0.0;
  double p_Tr_residual = 0.0;
  double diagonal_residual = 0.0;  // T(diag f) vs diag(P f)
  RealVec witness;                 // f >= 0 with G(f) finite, positive on transient states
  GreenFunction witness_green;
};

/// Throws NotStochastic.
StateClassification classify_states(const StochasticMatrix& p, const Tolerances& tol = {});

/// Throws NegativeInput or DimensionMismatch.
GreenFunction green_function(const StochasticMatrix& p, const RealVec& f, const Tolerances& tol = {});

/// Throws CrossCheckMismatch when the graph and spectral pipelines disagree
/// or the transience witness fails.
ClassicalCrossCheck crosscheck_quantum(const StochasticMatrix& p, const Tolerances& tol = {});

}  // namespace qmarkov
