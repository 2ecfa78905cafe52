#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmarkov/error.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Sink for non-fatal diagnostics (near-cutoff spectra and the like).
using Warnings = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Elementary helpers
// ---------------------------------------------------------------------------

Mat identity(int d);
Mat zeros(int d);
/// Matrix unit e_ij (zero-based indices).
Mat matrix_unit(int d, int i, int j);
/// Rank-one projector t_xi = |xi><xi| for a unit vector xi.
Mat rank_one(const Vec& xi);

double frobenius(const Mat& a);
/// Largest singular value.
double op_norm(const Mat& a);
Mat hermitian_part(const Mat& a);
Mat commutator(const Mat& a, const Mat& b);

/// Hilbert-Schmidt inner product tr(a* b).
cplx hs_inner(const Mat& a, const Mat& b);

/// Throws DimensionMismatch unless `a` is square of dimension `d`.
void require_square(const Mat& a, int d, std::string_view what);
/// Throws InvalidArgument on NaN or infinite entries.
void require_finite(const Mat& a, std::string_view what);

bool is_hermitian(const Mat& a, const Tolerances& tol = {});
/// Eigenvalues of the Hermitian part, ascending.
RealVec eigenvalues_h(const Mat& a);
double min_eigenvalue(const Mat& a);
double max_eigenvalue(const Mat& a);
bool is_psd(const Mat& a, const Tolerances& tol = {});
/// Throws NotHermitian / NotPsd with the offending value.
void require_psd(const Mat& a, const Tolerances& tol, std::string_view what);

/// Number of eigenvalues of a PSD matrix above eigen_cluster * ||a||.
int numerical_rank_psd(const Mat& a, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Orthogonal projections
// ---------------------------------------------------------------------------

/// Hermitian idempotent d x d matrix. Construction validates; the stored
/// matrix is re-symmetrised so downstream arithmetic sees an exact Hermitian.
class Projection {
 public:
  /// Throws NotProjection if ||p^2 - p|| or the {0,1} spectrum test fails.
  Projection() = default;
  static Projection from_matrix(const Mat& p, const Tolerances& tol = {});
  /// Projector onto the column span of `basis` (columns need not be orthonormal).
  static Projection onto_span(const Mat& basis, const Tolerances& tol = {});
  static Projection zero(int d);
  static Projection identity(int d);
  /// Diagonal projection with ones where `mask` is true.
  static Projection diagonal(const std::vector<bool>& mask);

  const Mat& matrix() const { return p_; }
  int dim() const { return static_cast<int>(p_.rows()); }
  int rank() const { return rank_; }
  bool is_zero() const { return rank_ == 0; }
  bool is_identity() const { return rank_ == dim(); }

  /// 1 - p.
  Projection complement() const;
  /// Orthonormal basis of the range, d x rank.
  Mat range_basis() const;

 private:
  Projection(Mat p, int rank) : p_(std::move(p)), rank_(rank) {}
  Mat p_;
  int rank_ = 0;
};

/// Projector onto eigenvectors of `a` with eigenvalue > eigen_cluster * ||a||.
/// Zero when ||a|| <= tol.psd.
/// Throws NotPsd if min eigenvalue < -tol.psd. When `warnings` is non-null
/// and an eigenvalue sits within 10x of the cutoff, a note is appended.
Projection support_projection(const Mat& a, const Tolerances& tol = {},
                              Warnings* warnings = nullptr);

/// a <= b in the Loewner order: min eig(b - a) >= -tol.psd.
bool loewner_leq(const Mat& a, const Mat& b, const Tolerances& tol = {});

/// Smallest projection dominating every element: support of the sum.
Projection proj_join(std::span<const Projection> ps, const Tolerances& tol = {});
/// Projector onto the intersection of ranges, 1 - join(p^perp, q^perp).
Projection proj_meet(const Projection& p, const Projection& q, const Tolerances& tol = {});
/// p <= q for projections.
bool proj_leq(const Projection& p, const Projection& q, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Hermitian bases under the Hilbert-Schmidt inner product
// ---------------------------------------------------------------------------

/// Orthonormal Hermitian basis of the real span of the Hermitian and
/// anti-Hermitian parts of `elements`. Used for adjoint-closed subspaces
/// (fixed spaces, ranges of Hermiticity-preserving maps).
std::vector<Mat> hermitian_basis(std::span<const Mat> elements, const Tolerances& tol = {});

/// Coordinates of x in an orthonormal Hermitian basis, plus the residual
/// ||x - sum c_k b_k||_F.
struct Expansion {
  std::vector<cplx> coeffs;
  double residual = 0.0;
};
Expansion expand(const Mat& x, std::span<const Mat> basis);

}  // namespace qmarkov
