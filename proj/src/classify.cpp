#include "qmarkov/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmarkov/kernels.hpp"

namespace qmarkov {

bool is_superharmonic(const QuantumChannel& t, const Mat& a, const Tolerances& tol) {
  require_psd(a, tol, "element");
  return loewner_leq(t.apply(a), a, tol);
}

bool is_subharmonic(const QuantumChannel& t, const Mat& a, const Tolerances& tol) {
  require_psd(a, tol, "element");
  return loewner_leq(a, t.apply(a), tol);
}

double subharmonic_projection_identity_check(const QuantumChannel& t, const Projection& p,
                                             std::span<const Mat> xs, const Tolerances& tol) {
  require_markov(t, tol);
  if (p.dim() != t.dim()) throw Error(ErrorKind::DimensionMismatch, "projection and channel differ in dimension");
  if (!is_subharmonic(t, p.matrix(), tol)) {
    throw Error(ErrorKind::NotSubharmonic,
                "min eig(T(p) - p) = " + std::to_string(min_eigenvalue(t.apply(p.matrix()) - p.matrix())));
  }
  const Mat& pm = p.matrix();
  double worst = 0.0;
  for (const auto& x : xs) {
    require_square(x, t.dim(), "test element");
    const Mat lhs = pm * t.apply(x) * pm;
    const Mat rhs = pm * t.apply(pm * x * pm) * pm;
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

ProjectionVerdict classify_projection(const ErgodicAnalysis& an, const Projection& p) {
  const Tolerances& tol = an.tolerances();
  if (p.dim() != an.dim()) throw Error(ErrorKind::DimensionMismatch, "projection and channel differ in dimension");
  const RecurrenceSplit& split = an.split();
  ProjectionVerdict v{p, false, false, false, false, false, {}};

  const double tr_margin = min_eigenvalue(split.p_Tr.matrix() - p.matrix());
  const double r_margin = min_eigenvalue(split.p_R.matrix() - p.matrix());
  v.transient = tr_margin >= -tol.psd;
  v.recurrent = r_margin >= -tol.psd;
  v.positive_recurrent = v.recurrent;
  v.null_recurrent = p.is_zero();

  // p ^ p_R^perp = 0  <=>  p^perp v p_R = 1, decided by rank.
  const Projection pair[] = {p.complement(), split.p_R};
  const int join_rank = proj_join(pair, tol).rank();
  v.skew_recurrent = join_rank == an.dim();

  v.evidence["p_Tr_minus_p_min_eig"] = tr_margin;
  v.evidence["p_R_minus_p_min_eig"] = r_margin;
  v.evidence["rank_join_pperp_pR"] = join_rank;
  v.evidence["dim"] = an.dim();
  v.evidence["rank_p"] = p.rank();
  return v;
}

ProjectionVerdict classify_projection(const QuantumChannel& t, const Projection& p, const Tolerances& tol) {
  return classify_projection(ErgodicAnalysis(t, tol), p);
}

namespace {

double quad(const Mat& x, const Vec& xi) { return std::real(xi.dot(x * xi)); }

cplx quad_c(const Mat& x, const Vec& xi) { return xi.dot(x * xi); }

// ||(1 - T) y - x|| for the candidate potential y of x; small exactly when
// the series sum T^n(x) converges.
double summability_residual(const ErgodicAnalysis& an, const Mat& x) {
  const Mat y = an.solve_potential(x);
  return (y - an.apply(y) - x).norm();
}

}  // namespace

Thm62Report thm62_crosscheck(const ErgodicAnalysis& an, const Projection& p) {
  const Tolerances& tol = an.tolerances();
  if (p.dim() != an.dim()) throw Error(ErrorKind::DimensionMismatch, "projection and channel differ in dimension");
  const double eps = 10.0 * tol.residual;
  const Mat& pm = p.matrix();
  const RecurrenceSplit& split = an.split();
  Thm62Report r;

  // (1) p <= p_Tr
  r.value[0] = min_eigenvalue(split.p_Tr.matrix() - pm);
  r.condition[0] = r.value[0] >= -tol.psd;

  // (2) p is T-summable: the candidate solution of (1 - T) y = p is exact.
  r.value[1] = summability_residual(an, pm);
  r.condition[1] = r.value[1] <= eps * std::max(1.0, pm.norm());

  // (3) T^n(p) -> 0: the peripheral spectral projection annihilates p.
  r.value[2] = an.apply_peripheral(pm).norm();
  r.condition[2] = r.value[2] <= eps * std::max(1.0, pm.norm());

  // (4) phi(p) = 0 for every stationary state; the stationary states span
  // the fixed space of the pre-adjoint.
  {
    const Mat fixed_pre = an.ergodic().super.adjoint();
    // Columns of P_* span Fix T_*; evaluate tr(rho p) on an orthonormal basis.
    Eigen::JacobiSVD<Mat> svd(fixed_pre, Eigen::ComputeThinU);
    double worst = 0.0;
    const auto& s = svd.singularValues();
    for (int k = 0; k < s.size() && s(k) > 0.5; ++k) {
      const Mat rho = kernels::unvec(svd.matrixU().col(k), an.dim());
      worst = std::max(worst, std::abs((rho * pm).trace()));
    }
    r.value[3] = worst;
    r.condition[3] = worst <= eps;
  }

  // (5) p <= supp y for a potential y; p_Tr is itself a potential, so take
  // y = sum T^n(p_Tr - T(p_Tr)).
  try {
    const Mat charge = hermitian_part(split.p_Tr.matrix() - an.apply(split.p_Tr.matrix()));
    const Mat y = potential_sum(an, charge);
    const Projection supp = support_projection(y, tol);
    r.value[4] = min_eigenvalue(supp.matrix() - pm);
    r.condition[4] = r.value[4] >= -tol.psd;
  } catch (const Error&) {
    r.value[4] = std::numeric_limits<double>::quiet_NaN();
    r.condition[4] = false;
  }

  // (6)-(9): rank-one tests along an orthonormal basis of range(p).
  const Mat basis = p.range_basis();
  double c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
  const std::size_t clusters = an.peripheral().size();
  for (int i = 0; i < basis.cols(); ++i) {
    const Vec xi = basis.col(i);
    const Mat t = rank_one(xi);
    c6 = std::max(c6, summability_residual(an, t));
    // sum_n <T^n(t) xi, xi> converges iff every peripheral eigen-component
    // of the scalar sequence vanishes.
    for (const auto& c : an.peripheral()) c7 = std::max(c7, std::abs(quad_c(apply_super(c.projector, t), xi)));
    // The peripheral part of <T^n(t) xi, xi> is a finite exponential sum;
    // it tends to zero iff its first `clusters` samples vanish.
    Mat per = an.apply_peripheral(t);
    for (std::size_t k = 0; k < clusters; ++k) {
      c8 = std::max(c8, std::abs(quad_c(per, xi)));
      per = an.apply(per);
    }
    c9 = std::max(c9, quad(an.apply_ergodic(t), xi));
  }
  r.value[5] = c6;
  r.condition[5] = c6 <= eps;
  r.value[6] = c7;
  r.condition[6] = c7 <= eps;
  r.value[7] = c8;
  r.condition[7] = c8 <= eps;
  r.value[8] = c9;
  r.condition[8] = c9 <= eps;

  r.agree = std::all_of(std::begin(r.condition), std::end(r.condition),
                        [&](bool b) { return b == r.condition[0]; });
  return r;
}

Thm62Report thm62_crosscheck(const QuantumChannel& t, const Projection& p, const Tolerances& tol) {
  return thm62_crosscheck(ErgodicAnalysis(t, tol), p);
}

HaagResult haag_criterion(const ErgodicAnalysis& an, const Vec& xi, long long n_terms) {
  const Tolerances& tol = an.tolerances();
  if (xi.size() != an.dim()) throw Error(ErrorKind::DimensionMismatch, "vector and channel differ in dimension");
  if (std::abs(xi.norm() - 1.0) > tol.residual) {
    throw Error(ErrorKind::NotUnitVector, "||xi|| = " + std::to_string(xi.norm()));
  }
  if (n_terms < 1) throw Error(ErrorKind::InvalidArgument, "Cesaro length must be positive");
  const Mat t = rank_one(xi);
  HaagResult h;
  h.exact = quad(an.apply_ergodic(t), xi);

  // Iterate in the Schroedinger picture: <T^n(t) xi, xi> = tr(T_*^n(t) t).
  const Mat pre = an.channel().super().adjoint();
  Vec v = kernels::vec(t);
  const Vec w = kernels::vec(t);
  double sum = 0.0;
  for (long long n = 0; n < n_terms; ++n) {
    sum += std::real(w.dot(v));
    v = pre * v;
  }
  h.empirical = sum / static_cast<double>(n_terms);
  h.positive = h.exact > tol.residual;
  h.outside_transient = !loewner_leq(t, an.split().p_Tr.matrix(), tol);
  h.consistent = h.positive == h.outside_transient;
  return h;
}

HaagResult haag_criterion(const QuantumChannel& t, const Vec& xi, long long n_terms, const Tolerances& tol) {
  return haag_criterion(ErgodicAnalysis(t, tol), xi, n_terms);
}

double superharmonic_lattice_check(const QuantumChannel& t, std::span<const Projection> ps, const Tolerances& tol) {
  require_markov(t, tol);
  if (ps.empty()) throw Error(ErrorKind::InvalidArgument, "empty projection family");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].dim() != t.dim()) throw Error(ErrorKind::DimensionMismatch, "projection and channel differ in dimension");
    if (!loewner_leq(t.apply(ps[i].matrix()), ps[i].matrix(), tol)) {
      throw Error(ErrorKind::NotSuperharmonic, "projection " + std::to_string(i) + " is not superharmonic");
    }
  }
  auto violation = [&](const Projection& q) {
    return std::max(0.0, max_eigenvalue(t.apply(q.matrix()) - q.matrix()));
  };
  double worst = violation(proj_join(ps, tol));
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) worst = std::max(worst, violation(proj_meet(ps[i], ps[j], tol)));
  return worst;
}

double recurrence_fixedness_check(const ErgodicAnalysis& an, const Projection& p, std::span<const Mat> as) {
  const Tolerances& tol = an.tolerances();
  if (p.dim() != an.dim()) throw Error(ErrorKind::DimensionMismatch, "projection and channel differ in dimension");
  if (!proj_leq(p, an.split().p_R, tol)) throw Error(ErrorKind::NotRecurrent, "p is not dominated by p_R");
  const Mat& pm = p.matrix();
  double worst = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    require_psd(as[i], tol, "superharmonic element");
    const Mat ta = an.apply(as[i]);
    if (!loewner_leq(ta, as[i], tol)) {
      throw Error(ErrorKind::NotSuperharmonic, "element " + std::to_string(i) + " is not superharmonic");
    }
    worst = std::max(worst, (pm * ta * pm - pm * as[i] * pm).norm());
  }
  return worst;
}

double recurrence_fixedness_check(const QuantumChannel& t, const Projection& p, std::span<const Mat> as,
                                  const Tolerances& tol) {
  return recurrence_fixedness_check(ErgodicAnalysis(t, tol), p, as);
}

}  // namespace qmarkov
