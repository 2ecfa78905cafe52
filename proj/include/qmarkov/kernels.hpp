#pragma once

// Data-parallel building blocks for superoperator arithmetic.
//
// Every kernel comes in two flavours: a plain serial loop kept as the
// reference implementation, and an OpenMP version used by the library.
// The unit tests pin the two against each other and bench/ times them.
//
// Vectorisation convention (used everywhere in the library): column
// stacking, vec(x)[i + j*d] = x(i, j), which matches Eigen's column-major
// storage. Under this convention vec(a x b) = (b^T kron a) vec(x).

#include <span>
#include <vector>

#include "qmarkov/core.hpp"

namespace qmarkov::kernels {

/// Superoperator of x -> sum_k k* x k, i.e. sum_k conj-transpose pairs
/// (k^T kron k*). Entry [a + b d, i + j d] = sum_k conj(k(i,a)) k(j,b).
Mat superop_from_kraus_serial(std::span<const Mat> kraus);
Mat superop_from_kraus_parallel(std::span<const Mat> kraus);

/// Choi matrix C = sum_ij e_ij kron T(e_ij) from a superoperator:
/// C[i d + a, j d + b] = S[a + b d, i + j d]. The map is its own inverse
/// up to the index relabelling, see superop_from_choi_*.
Mat choi_from_superop_serial(const Mat& super, int d);
Mat choi_from_superop_parallel(const Mat& super, int d);
Mat superop_from_choi_serial(const Mat& choi, int d);
Mat superop_from_choi_parallel(const Mat& choi, int d);

/// Apply a superoperator to each matrix in `xs`.
std::vector<Mat> apply_many_serial(const Mat& super, std::span<const Mat> xs);
std::vector<Mat> apply_many_parallel(const Mat& super, std::span<const Mat> xs);

/// Hilbert-Schmidt Gram matrix G_ij = tr(x_i* x_j).
Mat gram_serial(std::span<const Mat> xs);
Mat gram_parallel(std::span<const Mat> xs);

/// Matrix of x -> a x b as a superoperator.
Mat sandwich(const Mat& a, const Mat& b);

/// Kronecker product.
Mat kron(const Mat& a, const Mat& b);

/// Superoperator of y -> w* m(v y v*) w for isometries v (d x r), w (d x s):
/// the restriction of m to corners, as a map M_r -> M_s.
Mat restrict_map(const Mat& m, const Mat& v, const Mat& w);

/// Library entry points; these dispatch to the OpenMP variants.
inline Mat superop_from_kraus(std::span<const Mat> kraus) { return superop_from_kraus_parallel(kraus); }
inline Mat choi_from_superop(const Mat& super, int d) { return choi_from_superop_parallel(super, d); }
inline Mat superop_from_choi(const Mat& choi, int d) { return superop_from_choi_parallel(choi, d); }
inline std::vector<Mat> apply_many(const Mat& super, std::span<const Mat> xs) {
  return apply_many_parallel(super, xs);
}
inline Mat gram(std::span<const Mat> xs) { return gram_parallel(xs); }

/// vec / unvec under the column-stacking convention.
Vec vec(const Mat& x);
Mat unvec(const Vec& v, int d);

}  // namespace qmarkov::kernels
