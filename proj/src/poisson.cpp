#include "qmarkov/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "qmarkov/kernels.hpp"

namespace qmarkov {

namespace {

std::vector<Mat> compress_all(const std::vector<Mat>& xs, const Mat& p) {
  std::vector<Mat> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(p * x * p);
  return out;
}

Mat poisson_integral_in(const ErgodicAnalysis& an, const std::vector<Mat>& basis, const Mat& x) {
  const Tolerances& tol = an.tolerances();
  require_square(x, an.dim(), "boundary element");
  const Mat& pr = an.split().p_R.matrix();
  const double scale = std::max(1.0, x.norm());
  const double off = (x - pr * x * pr).norm();
  if (off > tol.residual * scale) {
    throw Error(ErrorKind::NotInCompressedAlgebra, "||x - p_R x p_R|| = " + std::to_string(off));
  }
  const double res = expand(x, basis).residual;
  if (res > tol.residual * scale) {
    throw Error(ErrorKind::NotInCompressedAlgebra, "distance to p_R Fix T p_R = " + std::to_string(res));
  }
  return an.apply_ergodic(x);
}

}  // namespace

WmeReport verify_wme(const ErgodicAnalysis& an) {
  const Tolerances& tol = an.tolerances();
  const int d = an.dim();
  const Mat& pr = an.split().p_R.matrix();
  WmeReport r;
  r.ergodic_unit_residual = (an.apply_ergodic(pr) - identity(d)).norm();
  r.unit_ok = r.ergodic_unit_residual <= tol.residual;

  const FixedSpace fs = fixed_space(an.channel(), tol);
  r.fixed_dim = fs.dim();
  Mat cols(d * d, fs.dim());
  for (int k = 0; k < fs.dim(); ++k) cols.col(k) = kernels::vec(pr * fs.basis[k] * pr);
  if (fs.dim() > 0) {
    Eigen::JacobiSVD<Mat> svd(cols);
    const auto& s = svd.singularValues();
    r.compression_min_singular = s(s.size() - 1);
    const double cut = std::sqrt(tol.eigen_cluster);
    r.compression_rank = static_cast<int>((s.array() > cut).count());
  }
  r.injective = r.compression_rank == r.fixed_dim;
  r.transient_potential = is_potential(an, an.split().p_Tr.matrix());
  return r;
}

WmeReport verify_wme(const QuantumChannel& t, const Tolerances& tol) { return verify_wme(ErgodicAnalysis(t, tol)); }

std::vector<Mat> compressed_fixed_algebra(const ErgodicAnalysis& an) {
  const Tolerances& tol = an.tolerances();
  const Projection& p_R = an.split().p_R;
  const FixedSpace fs = fixed_space(an.channel(), tol);
  std::vector<Mat> basis = hermitian_basis(compress_all(fs.basis, p_R.matrix()), tol);

  // Independent route: fixed points of T_R(x) = p_R T(x) p_R on the corner.
  const Mat v = p_R.range_basis();
  const int r = p_R.rank();
  const Mat tr = kernels::restrict_map(an.channel().super(), v, v);
  Eigen::JacobiSVD<Mat> svd(tr - Mat::Identity(r * r, r * r));
  const auto& s = svd.singularValues();
  const double cut = tol.eigen_cluster * std::max(1.0, s(0));
  const int corner_dim = static_cast<int>((s.array() <= cut).count());

  double not_fixed = 0.0;
  for (const auto& b : basis) {
    const Vec y = kernels::vec(Mat(v.adjoint() * b * v));
    not_fixed = std::max(not_fixed, (tr * y - y).norm());
  }
  if (corner_dim != static_cast<int>(basis.size()) || not_fixed > 10.0 * tol.residual) {
    std::ostringstream os;
    os << "compressed fixed space has dimension " << basis.size() << ", fixed space of T_R has " << corner_dim
       << ", T_R residual on the compressed basis " << not_fixed;
    throw Error(ErrorKind::CrossCheckMismatch, os.str());
  }
  return basis;
}

std::vector<Mat> compressed_fixed_algebra(const QuantumChannel& t, const Tolerances& tol) {
  return compressed_fixed_algebra(ErgodicAnalysis(t, tol));
}

Mat poisson_integral(const ErgodicAnalysis& an, const Mat& x) {
  return poisson_integral_in(an, compressed_fixed_algebra(an), x);
}

Mat poisson_integral(const QuantumChannel& t, const Mat& x, const Tolerances& tol) {
  return poisson_integral(ErgodicAnalysis(t, tol), x);
}

PoissonBoundary poisson_boundary(const ErgodicAnalysis& an) {
  const Tolerances& tol = an.tolerances();
  PoissonBoundary pb;
  pb.p_R = an.split().p_R;
  const Mat& pr = pb.p_R.matrix();
  const Mat& ptr = an.split().p_Tr.matrix();
  pb.compressed_basis = compressed_fixed_algebra(an);
  const auto& b = pb.compressed_basis;
  const int n = static_cast<int>(b.size());

  for (const auto& x : b) {
    const Mat j = poisson_integral_in(an, b, x);
    pb.fixed_residual = std::max(pb.fixed_residual, (an.apply(j) - j).norm());
    pb.left_inverse_residual = std::max(pb.left_inverse_residual, (pr * j * pr - x).norm());
    pb.split_residual = std::max(pb.split_residual, (j - x - ptr * an.apply_ergodic(x) * ptr).norm());
    pb.j_table.push_back(j);
  }

  pb.structure.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Mat prod = b[i] * b[k];
      const Expansion e = expand(prod, b);
      pb.closure_residual = std::max(pb.closure_residual, e.residual);
      for (int m = 0; m < n; ++m) pb.structure[m](i, k) = e.coeffs[m];
      const Mat lhs = an.apply_ergodic(prod);
      const Mat rhs = an.apply_ergodic(pb.j_table[i] * pb.j_table[k]);
      pb.intertwining_residual = std::max(pb.intertwining_residual, (lhs - rhs).norm());
    }

  const double lim = 10.0 * tol.residual;
  std::ostringstream os;
  if (pb.closure_residual > lim) os << "compressed algebra not closed: " << pb.closure_residual << "; ";
  if (pb.intertwining_residual > lim) os << "J not multiplicative: " << pb.intertwining_residual << "; ";
  if (pb.fixed_residual > lim) os << "J(x) not fixed: " << pb.fixed_residual << "; ";
  if (pb.left_inverse_residual > lim) os << "compression is not a left inverse: " << pb.left_inverse_residual << "; ";
  if (pb.split_residual > lim) os << "J(x) != x + S(x): " << pb.split_residual << "; ";
  if (os.tellp() > 0) throw Error(ErrorKind::InvariantViolation, "Poisson boundary: " + os.str());
  return pb;
}

PoissonBoundary poisson_boundary(const QuantumChannel& t, const Tolerances& tol) {
  return poisson_boundary(ErgodicAnalysis(t, tol));
}

}  // namespace qmarkov
