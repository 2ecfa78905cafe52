#include "qmarkov/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qmarkov {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::NotUnital: return "NotUnital";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::NotAState: return "NotAState";
    case ErrorKind::EffectsDontSumToIdentity: return "EffectsDontSumToIdentity";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotSuperharmonic: return "NotSuperharmonic";
    case ErrorKind::NotSubharmonic: return "NotSubharmonic";
    case ErrorKind::NotRecurrent: return "NotRecurrent";
    case ErrorKind::NotSummable: return "NotSummable";
    case ErrorKind::NotPotentialForPower: return "NotPotentialForPower";
    case ErrorKind::NotIdempotent: return "NotIdempotent";
    case ErrorKind::RangeNotCommutative: return "RangeNotCommutative";
    case ErrorKind::NotInCompressedAlgebra: return "NotInCompressedAlgebra";
    case ErrorKind::NotHolevoProvenance: return "NotHolevoProvenance";
    case ErrorKind::InvalidComponents: return "InvalidComponents";
    case ErrorKind::NonSemisimpleUnitEigenvalue: return "NonSemisimpleUnitEigenvalue";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::CrossCheckMismatch: return "CrossCheckMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_breakdown(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSemisimpleUnitEigenvalue:
    case ErrorKind::InvariantViolation:
    case ErrorKind::CrossCheckMismatch:
    case ErrorKind::NonConvergence:
      return true;
    default:
      return false;
  }
}

void Tolerances::validate() const {
  for (double v : {hermitian, psd, projection, eigen_cluster, convergence, residual}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be finite and strictly positive");
    }
  }
}

Tolerances Tolerances::uniform(double value) {
  Tolerances t;
  t.hermitian = t.psd = t.projection = t.residual = value;
  t.convergence = value / 10.0;
  t.validate();
  return t;
}

Mat identity(int d) { return Mat::Identity(d, d); }
Mat zeros(int d) { return Mat::Zero(d, d); }

Mat matrix_unit(int d, int i, int j) {
  Mat e = Mat::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

Mat rank_one(const Vec& xi) { return xi * xi.adjoint(); }

double frobenius(const Mat& a) { return a.norm(); }

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

cplx hs_inner(const Mat& a, const Mat& b) { return (a.adjoint() * b).trace(); }

void require_square(const Mat& a, int d, std::string_view what) {
  if (a.rows() != d || a.cols() != d) {
    std::ostringstream os;
    os << what << " is " << a.rows() << "x" << a.cols() << ", expected " << d << "x" << d;
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

void require_finite(const Mat& a, std::string_view what) {
  if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " has non-finite entries");
}

bool is_hermitian(const Mat& a, const Tolerances& tol) {
  return a.rows() == a.cols() && (a - a.adjoint()).norm() <= tol.hermitian;
}

RealVec eigenvalues_h(const Mat& a) {
  if (a.size() == 0) return RealVec();
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Mat& a) {
  RealVec ev = eigenvalues_h(a);
  return ev.size() ? ev(0) : 0.0;
}

double max_eigenvalue(const Mat& a) {
  RealVec ev = eigenvalues_h(a);
  return ev.size() ? ev(ev.size() - 1) : 0.0;
}

bool is_psd(const Mat& a, const Tolerances& tol) {
  return is_hermitian(a, tol) && min_eigenvalue(a) >= -tol.psd;
}

void require_psd(const Mat& a, const Tolerances& tol, std::string_view what) {
  require_finite(a, what);
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not square");
  double herm = (a - a.adjoint()).norm();
  if (herm > tol.hermitian) {
    std::ostringstream os;
    os << what << ": ||a - a*|| = " << herm;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  double lo = min_eigenvalue(a);
  if (lo < -tol.psd) {
    std::ostringstream os;
    os << what << ": min eigenvalue " << lo;
    throw Error(ErrorKind::NotPsd, os.str());
  }
}

int numerical_rank_psd(const Mat& a, const Tolerances& tol) {
  RealVec ev = eigenvalues_h(a);
  if (ev.size() == 0) return 0;
  double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  double cut = tol.eigen_cluster * scale;
  return static_cast<int>((ev.array() > cut).count());
}

// ---------------------------------------------------------------------------

Projection Projection::from_matrix(const Mat& p, const Tolerances& tol) {
  require_finite(p, "projection");
  if (p.rows() != p.cols()) throw Error(ErrorKind::DimensionMismatch, "projection is not square");
  double herm = (p - p.adjoint()).norm();
  if (herm > tol.hermitian) {
    throw Error(ErrorKind::NotProjection, "not Hermitian, ||p - p*|| = " + std::to_string(herm));
  }
  Mat h = hermitian_part(p);
  double idem = (h * h - h).norm();
  if (idem > tol.projection) {
    throw Error(ErrorKind::NotProjection, "||p^2 - p|| = " + std::to_string(idem));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  int rank = 0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    double lam = es.eigenvalues()(k);
    if (std::abs(lam) > tol.projection && std::abs(lam - 1.0) > tol.projection) {
      throw Error(ErrorKind::NotProjection, "eigenvalue " + std::to_string(lam) + " not in {0,1}");
    }
    if (lam > 0.5) ++rank;
  }
  // Rebuild from the eigenvectors so the stored matrix is exactly idempotent
  // up to rounding.
  const int d = static_cast<int>(p.rows());
  Mat v = es.eigenvectors().rightCols(rank);
  Mat clean = rank ? Mat(v * v.adjoint()) : Mat::Zero(d, d);
  return Projection(std::move(clean), rank);
}

Projection Projection::onto_span(const Mat& basis, const Tolerances& tol) {
  const int d = static_cast<int>(basis.rows());
  if (basis.cols() == 0) return zero(d);
  Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeThinU);
  const RealVec& s = svd.singularValues();
  int r = 0;
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) > tol.eigen_cluster * s(0)) ++r;
  }
  Mat u = svd.matrixU().leftCols(r);
  return Projection(r ? Mat(u * u.adjoint()) : Mat::Zero(d, d), r);
}

Projection Projection::zero(int d) { return Projection(Mat::Zero(d, d), 0); }
Projection Projection::identity(int d) { return Projection(Mat::Identity(d, d), d); }

Projection Projection::diagonal(const std::vector<bool>& mask) {
  const int d = static_cast<int>(mask.size());
  Mat p = Mat::Zero(d, d);
  int r = 0;
  for (int i = 0; i < d; ++i) {
    if (mask[i]) {
      p(i, i) = 1.0;
      ++r;
    }
  }
  return Projection(std::move(p), r);
}

Projection Projection::complement() const {
  return Projection(Mat(Mat::Identity(dim(), dim()) - p_), dim() - rank_);
}

Mat Projection::range_basis() const {
  if (rank_ == 0) return Mat(dim(), 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(p_);
  return es.eigenvectors().rightCols(rank_);
}

Projection support_projection(const Mat& a, const Tolerances& tol, Warnings* warnings) {
  require_psd(a, tol, "support_projection input");
  const int d = static_cast<int>(a.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  const RealVec& ev = es.eigenvalues();
  double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  // Below the PSD tolerance the matrix is indistinguishable from zero; a
  // purely relative cut would keep rounding noise.
  if (scale <= tol.psd) return Projection::zero(d);
  const double cut = tol.eigen_cluster * scale;
  std::vector<int> keep;
  for (int k = 0; k < ev.size(); ++k) {
    if (ev(k) > cut) keep.push_back(k);
    if (warnings && std::abs(ev(k)) > cut / 10.0 && std::abs(ev(k)) < cut * 10.0) {
      std::ostringstream os;
      os << "support_projection: eigenvalue " << ev(k) << " lies within 10x of the rank cutoff " << cut;
      warnings->push_back(os.str());
    }
  }
  Mat v(d, static_cast<int>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) v.col(static_cast<int>(c)) = es.eigenvectors().col(keep[c]);
  return Projection::onto_span(v, tol);
}

bool loewner_leq(const Mat& a, const Mat& b, const Tolerances& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "loewner_leq operands differ in shape");
  }
  return min_eigenvalue(b - a) >= -tol.psd;
}

Projection proj_join(std::span<const Projection> ps, const Tolerances& tol) {
  if (ps.empty()) throw Error(ErrorKind::InvalidArgument, "proj_join of an empty family");
  const int d = ps.front().dim();
  Mat sum = Mat::Zero(d, d);
  for (const auto& p : ps) {
    if (p.dim() != d) throw Error(ErrorKind::DimensionMismatch, "proj_join operands differ in dimension");
    sum += p.matrix();
  }
  return support_projection(sum, tol);
}

Projection proj_meet(const Projection& p, const Projection& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw Error(ErrorKind::DimensionMismatch, "proj_meet operands differ in dimension");
  const Projection perps[] = {p.complement(), q.complement()};
  return proj_join(perps, tol).complement();
}

bool proj_leq(const Projection& p, const Projection& q, const Tolerances& tol) {
  return loewner_leq(p.matrix(), q.matrix(), tol);
}

// ---------------------------------------------------------------------------

std::vector<Mat> hermitian_basis(std::span<const Mat> elements, const Tolerances& tol) {
  if (elements.empty()) return {};
  const int d = static_cast<int>(elements.front().rows());
  const int n = d * d;
  // Each Hermitian matrix h is encoded as the real vector (Re h, Im h); the
  // Euclidean inner product of encodings equals tr(h1 h2).
  RealMat stack(2 * n, 2 * static_cast<int>(elements.size()));
  int col = 0;
  for (const auto& e : elements) {
    require_square(e, d, "basis element");
    const Mat re = hermitian_part(e);
    const Mat im = (e - e.adjoint()) / cplx(0.0, 2.0);
    for (const Mat* h : {&re, &im}) {
      Eigen::Map<const Eigen::VectorXcd> v(h->data(), n);
      stack.col(col).head(n) = v.real();
      stack.col(col).tail(n) = v.imag();
      ++col;
    }
  }
  Eigen::JacobiSVD<RealMat> svd(stack, Eigen::ComputeThinU);
  const RealVec& s = svd.singularValues();
  std::vector<Mat> basis;
  if (s.size() == 0 || s(0) == 0.0) return basis;
  // Relative cutoff on the spanning set; the input is a (possibly redundant)
  // spanning family with O(1) entries so a loose ratio is safe.
  const double cut = std::max(tol.eigen_cluster, 1e-8) * s(0);
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) <= cut) break;
    Eigen::VectorXd u = svd.matrixU().col(k);
    Mat h(d, d);
    Eigen::Map<Eigen::VectorXcd> hv(h.data(), n);
    for (int i = 0; i < n; ++i) hv(i) = cplx(u(i), u(n + i));
    basis.push_back(hermitian_part(h));
  }
  return basis;
}

Expansion expand(const Mat& x, std::span<const Mat> basis) {
  Expansion out;
  Mat rest = x;
  for (const auto& b : basis) {
    cplx c = hs_inner(b, x);
    out.coeffs.push_back(c);
    rest -= c * b;
  }
  out.residual = rest.norm();
  return out;
}

}  // namespace qmarkov
