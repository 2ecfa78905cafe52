#include "qmarkov/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qmarkov/kernels.hpp"

namespace qmarkov {

namespace {

// Eigenvalues of the superoperator within this distance are treated as one
// peripheral cluster. Semisimple unit-modulus eigenvalues of a contraction
// are computed to near machine precision, so the radius only has to absorb
// rounding.
constexpr double kClusterRadius = 1e-6;
constexpr double kPeripheralBand = 1e-9;
// Cesaro route: stop doubling once ||S_N T - S_N|| is this small or N hits
// the cap, then take powers of S_N (its non-unit spectrum is contracted).
constexpr double kCesaroSwitch = 1e-6;
constexpr int kCesaroMaxDoublings = 20;  // N_max = 2^20 ~ 10^6
constexpr int kCesaroMaxPowers = 100000;

struct NullSpaces {
  Mat right;  // columns span ker(A)
  Mat left;   // columns span ker(A*)
  double largest_kept = 0.0;
  double smallest_dropped = 0.0;
};

NullSpaces null_spaces(const Mat& a, const Tolerances& tol) {
  // BDCSVD is fast but occasionally returns NaN on exactly rank-deficient
  // input (seen with Eigen 3.4.0); Jacobi is the fallback.
  Mat u, v;
  RealVec s;
  {
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU();
    v = svd.matrixV();
    s = svd.singularValues();
  }
  const double recon = (u * s.asDiagonal() * v.adjoint() - a).norm();
  if (!std::isfinite(recon) || recon > 1e-10 * std::max(1.0, a.norm())) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU();
    v = svd.matrixV();
    s = svd.singularValues();
  }
  const int n = static_cast<int>(s.size());
  const double scale = std::max(1.0, n ? s(0) : 0.0);
  int m = 0;
  while (m < n && s(n - 1 - m) <= tol.eigen_cluster * scale) ++m;
  NullSpaces out;
  out.right = v.rightCols(m);
  out.left = u.rightCols(m);
  out.largest_kept = m ? s(n - m) : 0.0;
  out.smallest_dropped = m < n ? s(n - 1 - m) : 0.0;
  return out;
}

std::vector<Mat> columns_as_matrices(const Mat& cols, int d) {
  std::vector<Mat> out;
  for (int k = 0; k < cols.cols(); ++k) out.push_back(kernels::unvec(cols.col(k), d));
  return out;
}

Mat cesaro_projection(const Mat& t, const Tolerances& tol, long long* terms, int* powers) {
  const int n = static_cast<int>(t.rows());
  const Mat id = Mat::Identity(n, n);
  Mat s = id;      // S_N
  Mat tn = t;      // T^N
  long long count = 1;
  for (int k = 0; k < kCesaroMaxDoublings; ++k) {
    if ((s * t - s).norm() <= kCesaroSwitch) break;
    s = 0.5 * (s + s * tn);
    tn = tn * tn;
    count *= 2;
  }
  // S_N fixes Fix T exactly and shrinks every other spectral component, so
  // its powers converge to the ergodic projection.
  Mat x = s;
  int p = 0;
  while ((x * t - x).norm() > tol.convergence || (t * x - x).norm() > tol.convergence) {
    if (++p > kCesaroMaxPowers) {
      std::ostringstream os;
      os << "Cesaro means did not converge: N = " << count << ", residual " << (x * t - x).norm();
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    x = x * s;
  }
  if (terms) *terms = count;
  if (powers) *powers = p;
  return x;
}

}  // namespace

PeripheralCluster spectral_cluster(const Mat& super, cplx lambda, const Tolerances& tol) {
  const int n = static_cast<int>(super.rows());
  NullSpaces ns = null_spaces(super - lambda * Mat::Identity(n, n), tol);
  PeripheralCluster c;
  c.eigenvalue = lambda;
  c.multiplicity = static_cast<int>(ns.right.cols());
  if (c.multiplicity == 0) {
    c.projector = Mat::Zero(n, n);
    return c;
  }
  // E = V (W* V)^{-1} W*: the pairing W* V is invertible exactly when the
  // eigenvalue is semisimple.
  const Mat pairing = ns.left.adjoint() * ns.right;
  Eigen::JacobiSVD<Mat> psvd(pairing);
  const double smin = psvd.singularValues()(psvd.singularValues().size() - 1);
  if (smin < std::sqrt(tol.eigen_cluster)) {
    std::ostringstream os;
    os << "eigenvalue " << lambda << ": left/right eigenspaces pair with singular value " << smin;
    throw Error(ErrorKind::NonSemisimpleUnitEigenvalue, os.str());
  }
  c.projector = ns.right * pairing.inverse() * ns.left.adjoint();
  return c;
}

ErgodicAnalysis::ErgodicAnalysis(const QuantumChannel& t, const Tolerances& tol) : channel_(t), tol_(tol) {
  require_markov(channel_, tol_);
  const Mat& s = channel_.super();
  const int d = channel_.dim();
  const int n = d * d;

  PeripheralCluster unit = spectral_cluster(s, 1.0, tol_);
  if (unit.multiplicity == 0) {
    throw Error(ErrorKind::InvariantViolation, "no eigenvalue 1 found for a unital map");
  }
  ergodic_.super = unit.projector;
  ergodic_.method = ErgodicMethod::Spectral;

  // Peripheral spectrum: all eigenvalues of modulus ~1, grouped in clusters.
  Eigen::ComplexEigenSolver<Mat> es(s, false);
  std::vector<cplx> periph;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const cplx mu = es.eigenvalues()(k);
    if (std::abs(mu) > 1.0 - kPeripheralBand && std::abs(mu - 1.0) > kClusterRadius) periph.push_back(mu);
  }
  std::vector<std::vector<cplx>> groups;
  for (const cplx mu : periph) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return std::abs(g.front() - mu) <= kClusterRadius; });
    if (it == groups.end()) groups.push_back({mu});
    else it->push_back(mu);
  }
  peripheral_.push_back(unit);
  peripheral_projector_ = unit.projector;
  for (const auto& g : groups) {
    cplx mean = 0.0;
    for (const cplx mu : g) mean += mu;
    mean /= static_cast<double>(g.size());
    mean /= std::abs(mean);
    PeripheralCluster c = spectral_cluster(s, mean, tol_);
    if (c.multiplicity != static_cast<int>(g.size())) {
      std::ostringstream os;
      os << "peripheral eigenvalue " << mean << ": algebraic count " << g.size() << ", null space dimension "
         << c.multiplicity;
      warnings_.push_back(os.str());
    }
    if (c.multiplicity == 0) continue;
    peripheral_projector_ += c.projector;
    peripheral_.push_back(std::move(c));
  }

  // The maximal stationary state P_*(1/d): for any stationary psi,
  // 1/d >= eps * psi for some eps > 0, and P_* is positive with P_*(psi) = psi,
  // so supp psi <= supp P_*(1/d).
  Mat rho = apply_super(ergodic_.super.adjoint(), Mat::Identity(d, d) / static_cast<double>(d));
  rho = hermitian_part(rho);
  rho /= rho.trace().real();
  maximal_stationary_ = rho;

  Projection p_r = support_projection(maximal_stationary_, tol_, &warnings_);
  Projection p_tr = p_r.complement();
  split_ = RecurrenceSplit{p_r, p_tr, Projection::zero(d), 0.0, 0.0, 0.0};
  split_.subharmonic_margin = min_eigenvalue(channel_.apply(p_r.matrix()) - p_r.matrix());
  split_.superharmonic_margin = min_eigenvalue(p_tr.matrix() - channel_.apply(p_tr.matrix()));
  split_.sum_residual =
      (p_r.matrix() + p_tr.matrix() + split_.p_R0.matrix() - Mat::Identity(d, d)).norm();
  const double bound = -10.0 * tol_.residual;
  if (split_.subharmonic_margin < bound || split_.superharmonic_margin < bound) {
    std::ostringstream os;
    os << "recurrence split: min eig(T(p_R) - p_R) = " << split_.subharmonic_margin
       << ", min eig(p_Tr - T(p_Tr)) = " << split_.superharmonic_margin;
    throw Error(ErrorKind::InvariantViolation, os.str());
  }

  potential_solver_.compute(Mat::Identity(n, n) - s + peripheral_projector_);
}

Mat ErgodicAnalysis::solve_potential(const Mat& x) const {
  require_square(x, dim(), "potential charge");
  return kernels::unvec(potential_solver_.solve(kernels::vec(x)), dim());
}

FixedSpace fixed_space(const QuantumChannel& t, const Tolerances& tol) {
  require_markov(t, tol);
  const int n = t.dim() * t.dim();
  NullSpaces ns = null_spaces(t.super() - Mat::Identity(n, n), tol);
  const auto elems = columns_as_matrices(ns.right, t.dim());
  return FixedSpace{hermitian_basis(elems, tol)};
}

ErgodicProjection ergodic_projection(const QuantumChannel& t, const Tolerances& tol, ErgodicMethod method) {
  require_markov(t, tol);
  ErgodicProjection out;
  out.method = method;
  if (method == ErgodicMethod::Spectral) {
    out.super = spectral_cluster(t.super(), 1.0, tol).projector;
  } else {
    out.super = cesaro_projection(t.super(), tol, &out.cesaro_terms, &out.squarings);
  }
  return out;
}

StationaryStates stationary_states(const QuantumChannel& t, const Tolerances& tol) {
  ErgodicAnalysis an(t, tol);
  const int n = t.dim() * t.dim();
  NullSpaces ns = null_spaces(t.super().adjoint() - Mat::Identity(n, n), tol);
  const auto elems = columns_as_matrices(ns.right, t.dim());
  return StationaryStates{hermitian_basis(elems, tol), an.maximal_stationary()};
}

RecurrenceSplit recurrence_split(const QuantumChannel& t, const Tolerances& tol) {
  return ErgodicAnalysis(t, tol).split();
}

Mat potential_sum(const ErgodicAnalysis& an, const Mat& x) {
  const Tolerances& tol = an.tolerances();
  require_square(x, an.dim(), "charge");
  require_psd(x, tol, "charge");
  const double scale = std::max(1.0, x.norm());
  double worst = 0.0;
  cplx worst_lambda = 1.0;
  for (const auto& c : an.peripheral()) {
    const double comp = apply_super(c.projector, x).norm();
    if (comp > worst) {
      worst = comp;
      worst_lambda = c.eigenvalue;
    }
  }
  if (worst > tol.residual * scale) {
    std::ostringstream os;
    os << "peripheral eigenvalue " << worst_lambda << " carries component " << worst << " of the charge";
    throw Error(ErrorKind::NotSummable, os.str());
  }
  return hermitian_part(an.solve_potential(x));
}

Mat potential_sum(const QuantumChannel& t, const Mat& x, const Tolerances& tol) {
  return potential_sum(ErgodicAnalysis(t, tol), x);
}

bool is_potential(const ErgodicAnalysis& an, const Mat& y) {
  const Tolerances& tol = an.tolerances();
  if (!is_psd(y, tol)) return false;
  if (!loewner_leq(an.apply(y), y, tol)) return false;
  return an.apply_peripheral(y).norm() <= tol.residual * std::max(1.0, y.norm());
}

RieszDecomposition riesz_decompose(const ErgodicAnalysis& an, const Mat& a, ErgodicMethod method) {
  const Tolerances& tol = an.tolerances();
  require_square(a, an.dim(), "superharmonic element");
  require_psd(a, tol, "superharmonic element");
  const Mat ta = an.apply(a);
  const Mat gap = hermitian_part(ta - a);
  Eigen::SelfAdjointEigenSolver<Mat> es(gap);
  const int top = static_cast<int>(es.eigenvalues().size()) - 1;
  if (es.eigenvalues()(top) > tol.psd) {
    std::ostringstream os;
    os << "T(a) - a has eigenvalue " << es.eigenvalues()(top) << " with eigenvector ["
       << es.eigenvectors().col(top).transpose() << "]";
    throw Error(ErrorKind::NotSuperharmonic, os.str());
  }
  RieszDecomposition r;
  r.input = a;
  if (method == ErgodicMethod::Spectral) {
    r.harmonic = hermitian_part(an.apply_ergodic(a));
  } else {
    const ErgodicProjection p = ergodic_projection(an.channel(), tol, ErgodicMethod::Cesaro);
    r.harmonic = hermitian_part(p.apply(a));
  }
  r.potential = a - r.harmonic;
  r.charge = hermitian_part(r.potential - an.apply(r.potential));
  r.sum_residual = (a - r.potential - r.harmonic).norm();
  r.fixed_residual = (an.apply(r.harmonic) - r.harmonic).norm();
  r.charge_min_eigenvalue = min_eigenvalue(r.charge);
  r.potential_decay = an.apply_peripheral(r.potential).norm();
  return r;
}

RieszDecomposition riesz_decompose(const QuantumChannel& t, const Mat& a, const Tolerances& tol,
                                   ErgodicMethod method) {
  return riesz_decompose(ErgodicAnalysis(t, tol), a, method);
}

Mat power_potential_lift(const QuantumChannel& t, int n, const Mat& y, const Tolerances& tol) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "power must be a positive integer");
  require_square(y, t.dim(), "potential");
  require_psd(y, tol, "potential");
  ErgodicAnalysis base(t, tol);
  ErgodicAnalysis lifted(power(t, n), tol);
  if (!is_potential(lifted, y)) {
    throw Error(ErrorKind::NotPotentialForPower,
                "y is not a potential for T^" + std::to_string(n) + " (T^N(y) <= y or decay fails)");
  }
  Mat sum = Mat::Zero(t.dim(), t.dim());
  Mat term = y;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term = t.apply(term);
  }
  sum = hermitian_part(sum);
  if (!is_potential(base, sum)) {
    throw Error(ErrorKind::InvariantViolation, "lifted element failed the potential criterion for T");
  }
  return sum;
}

}  // namespace qmarkov
