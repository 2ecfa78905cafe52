#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qmarkov/ergodic.hpp"

namespace qmarkov {

bool is_superharmonic(const QuantumChannel& t, const Mat& a, const Tolerances& tol = {});
bool is_subharmonic(const QuantumChannel& t, const Mat& a, const Tolerances& tol = {});

/// max over xs of ||p T(x) p - p T(p x p) p||. Throws NotSubharmonic unless
/// T(p) >= p.
double subharmonic_projection_identity_check(const QuantumChannel& t, const Projection& p,
                                             std::span<const Mat> xs, const Tolerances& tol = {});

struct ProjectionVerdict {
  Projection projection;
  bool transient = false;
  bool recurrent = false;
  bool positive_recurrent = false;
  bool skew_recurrent = false;
  bool null_recurrent = false;
  /// Numeric witnesses: Loewner margins, rank arithmetic of the meet test.
  std::map<std::string, double> evidence;
};

ProjectionVerdict classify_projection(const ErgodicAnalysis& an, const Projection& p);
ProjectionVerdict classify_projection(const QuantumChannel& t, const Projection& p, const Tolerances& tol = {});

/// The nine equivalent characterisations of transience of a projection on
/// the full matrix algebra. Conditions (6)-(9) are evaluated per vector of
/// an orthonormal basis of range(p) and aggregated with "for all".
struct Thm62Report {
  static constexpr int kConditions = 9;
  bool condition[kConditions] = {};
  /// Numeric value backing each decision (a residual or a limit).
  double value[kConditions] = {};
  bool agree = false;
};

Thm62Report thm62_crosscheck(const ErgodicAnalysis& an, const Projection& p);
Thm62Report thm62_crosscheck(const QuantumChannel& t, const Projection& p, const Tolerances& tol = {});

struct HaagResult {
  double exact = 0.0;      // <P(t_xi) xi, xi>
  double empirical = 0.0;  // (1/N) sum_{n<N} <T^n(t_xi) xi, xi>
  bool positive = false;   // exact > tol.residual
  bool outside_transient = false;  // t_xi not <= p_R^perp
  bool consistent = false;         // positive == outside_transient
};

/// Throws NotUnitVector unless ||xi|| = 1 within tol.residual.
HaagResult haag_criterion(const ErgodicAnalysis& an, const Vec& xi, long long n_terms);
HaagResult haag_criterion(const QuantumChannel& t, const Vec& xi, long long n_terms, const Tolerances& tol = {});

/// Worst Loewner violation max eig(T(q) - q) over the join of all ps and the
/// pairwise meets. Throws NotSuperharmonic if some input is not.
double superharmonic_lattice_check(const QuantumChannel& t, std::span<const Projection> ps,
                                   const Tolerances& tol = {});

/// max over as of ||p T(a) p - p a p||. Throws NotRecurrent unless p <= p_R,
/// NotSuperharmonic unless every a is.
double recurrence_fixedness_check(const ErgodicAnalysis& an, const Projection& p, std::span<const Mat> as);
double recurrence_fixedness_check(const QuantumChannel& t, const Projection& p, std::span<const Mat> as,
                                  const Tolerances& tol = {});

}  // namespace qmarkov
