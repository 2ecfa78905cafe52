#include "qmarkov/kernels.hpp"

#include <omp.h>

namespace qmarkov::kernels {

namespace {

int kraus_dim(std::span<const Mat> kraus) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus family");
  const int d = static_cast<int>(kraus.front().rows());
  for (const auto& k : kraus) require_square(k, d, "Kraus operator");
  return d;
}

}  // namespace

Mat superop_from_kraus_serial(std::span<const Mat> kraus) {
  const int d = kraus_dim(kraus);
  const int n = d * d;
  Mat s = Mat::Zero(n, n);
  for (const auto& k : kraus) {
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i)
        for (int b = 0; b < d; ++b)
          for (int a = 0; a < d; ++a)
            s(a + b * d, i + j * d) += std::conj(k(i, a)) * k(j, b);
  }
  return s;
}

Mat superop_from_kraus_parallel(std::span<const Mat> kraus) {
  const int d = kraus_dim(kraus);
  const int n = d * d;
  Mat s = Mat::Zero(n, n);
  // One output column per (i, j); columns are disjoint so no reduction.
#pragma omp parallel for schedule(static)
  for (int col = 0; col < n; ++col) {
    const int i = col % d;
    const int j = col / d;
    for (const auto& k : kraus) {
      for (int b = 0; b < d; ++b) {
        const cplx kjb = k(j, b);
        for (int a = 0; a < d; ++a) s(a + b * d, col) += std::conj(k(i, a)) * kjb;
      }
    }
  }
  return s;
}

Mat choi_from_superop_serial(const Mat& super, int d) {
  require_square(super, d * d, "superoperator");
  Mat c(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) c(i * d + a, j * d + b) = super(a + b * d, i + j * d);
  return c;
}

Mat choi_from_superop_parallel(const Mat& super, int d) {
  require_square(super, d * d, "superoperator");
  const int n = d * d;
  Mat c(n, n);
#pragma omp parallel for schedule(static)
  for (int col = 0; col < n; ++col) {
    const int j = col / d;
    const int b = col % d;
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) c(i * d + a, col) = super(a + b * d, i + j * d);
  }
  return c;
}

Mat superop_from_choi_serial(const Mat& choi, int d) {
  require_square(choi, d * d, "Choi matrix");
  Mat s(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a + b * d, i + j * d) = choi(i * d + a, j * d + b);
  return s;
}

Mat superop_from_choi_parallel(const Mat& choi, int d) {
  require_square(choi, d * d, "Choi matrix");
  const int n = d * d;
  Mat s(n, n);
#pragma omp parallel for schedule(static)
  for (int col = 0; col < n; ++col) {
    const int i = col % d;
    const int j = col / d;
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a) s(a + b * d, col) = choi(i * d + a, j * d + b);
  }
  return s;
}

std::vector<Mat> apply_many_serial(const Mat& super, std::span<const Mat> xs) {
  std::vector<Mat> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    const int d = static_cast<int>(x.rows());
    out.push_back(unvec(super * vec(x), d));
  }
  return out;
}

std::vector<Mat> apply_many_parallel(const Mat& super, std::span<const Mat> xs) {
  std::vector<Mat> out(xs.size());
  const int count = static_cast<int>(xs.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    const int d = static_cast<int>(xs[k].rows());
    out[k] = unvec(super * vec(xs[k]), d);
  }
  return out;
}

Mat gram_serial(std::span<const Mat> xs) {
  const int m = static_cast<int>(xs.size());
  Mat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = hs_inner(xs[i], xs[j]);
  return g;
}

Mat gram_parallel(std::span<const Mat> xs) {
  const int m = static_cast<int>(xs.size());
  Mat g(m, m);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const cplx v = xs[i].cwiseProduct(xs[j].conjugate()).sum();
      g(j, i) = v;             // tr(x_j* x_i)
      g(i, j) = std::conj(v);  // tr(x_i* x_j)
    }
  }
  return g;
}

Mat sandwich(const Mat& a, const Mat& b) {
  const int d = static_cast<int>(a.rows());
  const int n = d * d;
  Mat s(n, n);
  // vec(a x b) = (b^T kron a) vec(x)
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p) s(p + q * d, i + j * d) = b(j, q) * a(p, i);
  return s;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat restrict_map(const Mat& m, const Mat& v, const Mat& w) {
  return kron(w.transpose(), w.adjoint()) * m * kron(v.conjugate(), v);
}

Vec vec(const Mat& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

Mat unvec(const Vec& v, int d) { return Eigen::Map<const Mat>(v.data(), d, d); }

}  // namespace qmarkov::kernels
