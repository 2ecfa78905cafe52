#pragma once

// Seeded generators and brute-force oracles shared by the test binaries.
// Oracles here avoid the library's spectral machinery: they iterate the
// channel, solve with plain Gaussian elimination, or build objects whose
// answer is known by construction.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include "qmarkov/channel.hpp"
#include "qmarkov/kernels.hpp"

namespace qmtest {

using namespace qmarkov;

struct Rng {
  std::mt19937_64 g;
  explicit Rng(unsigned long long seed) : g(seed) {}
  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(g); }
  double normal() { return std::normal_distribution<double>()(g); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
  bool coin(double p = 0.5) { return uniform() < p; }
};

inline Mat gaussian(int rows, int cols, Rng& r) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(r.normal(), r.normal());
  return m;
}

/// Orthonormal columns spanning a random subspace (rows x cols, cols <= rows).
inline Mat random_isometry(int rows, int cols, Rng& r) {
  Eigen::HouseholderQR<Mat> qr(gaussian(rows, cols, r));
  return qr.householderQ() * Mat::Identity(rows, cols);
}

inline Mat random_unitary(int d, Rng& r) { return random_isometry(d, d, r); }

inline Vec random_unit_vector(int d, Rng& r) {
  Vec v = gaussian(d, 1, r).col(0);
  return v / v.norm();
}

inline Mat random_psd(int d, int rank, Rng& r) {
  const Mat g = gaussian(d, rank, r);
  return g * g.adjoint();
}

inline Mat random_density(int d, int rank, Rng& r) {
  Mat m = random_psd(d, rank, r);
  return m / m.trace().real();
}

/// Kraus operators k_1..k_m with sum k_i* k_i = 1 from a random isometry.
inline std::vector<Mat> random_kraus(int d, int m, Rng& r) {
  const Mat v = random_isometry(m * d, d, r);
  std::vector<Mat> ks;
  for (int i = 0; i < m; ++i) ks.push_back(v.middleRows(i * d, d));
  return ks;
}

/// Channel with known recurrent structure. Invariant blocks of the
/// Schroedinger picture are the recurrent blocks; the remaining basis
/// vectors leak into them. The whole picture is rotated by a random unitary.
struct StructuredChannel {
  QuantumChannel channel = QuantumChannel::identity_channel(1);
  Mat p_R;   // known recurrent projection
  Mat p_Tr;
  int period = 1;  // lcm of the periods of the permutation blocks
};

inline StructuredChannel structured_channel(int d, Rng& r, bool allow_periodic = true) {
  // Two or more Kraus operators keep the non-permutation blocks primitive
  // and let transient columns leak.
  const int m = r.integer(2, 3);
  // Block sizes; the remainder is transient (possibly empty).
  std::vector<int> blocks;
  int used = 0;
  const int n_rec = r.integer(1, d);
  while (used < n_rec) {
    const int b = std::min(r.integer(1, 3), n_rec - used);
    blocks.push_back(b);
    used += b;
  }

  Mat v = Mat::Zero(m * d, d);  // stacked Kraus operators, columns = inputs
  int period = 1;
  int start = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int s = blocks[b];
    if (allow_periodic && s >= 2 && r.coin(0.3)) {
      // Cyclic permutation on the block in the first Kraus operator.
      for (int k = 0; k < s; ++k) v(start + (k + 1) % s, start + k) = 1.0;
      period = std::lcm(period, s);
    } else {
      // Random isometry from the block into m copies of the block.
      const Mat iso = random_isometry(m * s, s, r);
      for (int i = 0; i < m; ++i) v.block(i * d + start, start, s, s) = iso.middleRows(i * s, s);
    }
    start += s;
  }
  // Transient inputs: generic columns orthogonal to everything before.
  for (int c = used; c < d; ++c) {
    Vec col = gaussian(m * d, 1, r).col(0);
    for (int rep = 0; rep < 2; ++rep)
      for (int k = 0; k < c; ++k) col -= v.col(k).dot(col) * v.col(k);
    v.col(c) = col / col.norm();
  }
  // T(x) = sum K_i* x K_i with K_i the i-th block of rows of v, so the
  // block spans are invariant for the predual and carry faithful states.
  const Mat u = random_unitary(d, r);
  std::vector<Mat> ks;
  for (int i = 0; i < m; ++i) ks.push_back(u * v.middleRows(i * d, d) * u.adjoint());

  StructuredChannel out;
  out.channel = QuantumChannel::from_kraus(ks);
  Mat pr = Mat::Zero(d, d);
  for (int k = 0; k < used; ++k) pr(k, k) = 1.0;
  out.p_R = u * pr * u.adjoint();
  out.p_Tr = Mat::Identity(d, d) - out.p_R;
  out.period = period;
  return out;
}

inline RealMat random_stochastic(int n, Rng& r) {
  RealMat p = RealMat::Zero(n, n);
  const double density = r.uniform(0.15, 0.6);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (r.coin(density)) p(i, j) = r.uniform(0.1, 1.0);
    if (r.coin(0.15)) {
      p.row(i).setZero();
      p(i, i) = 1.0;
    }
    if (p.row(i).sum() == 0.0) p(i, r.integer(0, n - 1)) = 1.0;
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

inline HolevoForm random_holevo(int d, int n, Rng& r) {
  HolevoForm h;
  std::vector<Mat> g;
  Mat sum = Mat::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    h.states.push_back(random_density(d, r.integer(1, d), r));
    g.push_back(random_psd(d, d, r));
    sum += g.back();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sum);
  const Mat inv_sqrt = es.operatorInverseSqrt();
  for (const auto& x : g) h.effects.push_back(inv_sqrt * x * inv_sqrt);
  return h;
}

/// Idempotent channel assembled from a conditional expectation Q onto
/// (+)_b M_{n_b} (x) 1_{m_b} inside a random corner, composed with either a
/// *-homomorphism into the complementary corner or a generic unital CP map.
struct IdempotentSample {
  Mat p_R;
  Mat Q;
  std::optional<Mat> S;
  Mat P;
  bool homomorphic = false;
};

inline IdempotentSample random_idempotent(int d, bool homomorphic, Rng& r, bool full_corner = false) {
  struct Block {
    int n, m, k;
    Mat sigma;  // faithful state on M_m
  };
  std::vector<Block> blocks;
  for (;;) {
    blocks.clear();
    const int nb = r.integer(1, 3);
    int total = 0, corner = 0;
    for (int b = 0; b < nb; ++b) {
      Block blk{r.integer(1, 2), r.integer(1, 2), full_corner ? 0 : r.integer(0, 2), {}};
      blocks.push_back(blk);
      total += blk.n * (blk.m + blk.k);
      corner += blk.n * blk.m;
    }
    if (total != d) continue;
    if (full_corner || corner < d) break;
  }
  int rank = 0, tr = 0;
  for (auto& b : blocks) {
    Mat s = random_psd(b.m, b.m, r) + 0.2 * Mat::Identity(b.m, b.m);
    b.sigma = s / s.trace().real();
    rank += b.n * b.m;
    tr += b.n * b.k;
  }
  const Mat u = random_unitary(d, r);
  const Mat ur = u.leftCols(rank), ut = u.rightCols(tr);
  // generic unital CP map from M_rank into M_tr: y -> sum_j K_j* y K_j
  const int mk = std::max(r.integer(1, 3), (tr + rank - 1) / rank);
  const Mat iso = random_isometry(rank * mk, std::max(tr, 1), r);

  auto q_map = [=](const Mat& x) {
    const Mat y = ur.adjoint() * x * ur;
    Mat out = Mat::Zero(rank, rank);
    int off = 0;
    for (const auto& b : blocks) {
      for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j) {
          cplx v = 0.0;
          for (int a = 0; a < b.m; ++a)
            for (int c = 0; c < b.m; ++c) v += y(off + i * b.m + a, off + j * b.m + c) * b.sigma(c, a);
          for (int a = 0; a < b.m; ++a) out(off + i * b.m + a, off + j * b.m + a) = v;
        }
      off += b.n * b.m;
    }
    return Mat(ur * out * ur.adjoint());
  };
  auto s_hom = [=](const Mat& x) {
    const Mat y = ur.adjoint() * x * ur;
    Mat out = Mat::Zero(tr, tr);
    int off = 0, toff = 0;
    for (const auto& b : blocks) {
      for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j)
          for (int a = 0; a < b.k; ++a) out(toff + i * b.k + a, toff + j * b.k + a) = y(off + i * b.m, off + j * b.m);
      off += b.n * b.m;
      toff += b.n * b.k;
    }
    return Mat(ut * out * ut.adjoint());
  };
  auto s_gen = [=](const Mat& x) {
    const Mat y = ur.adjoint() * x * ur;
    Mat out = Mat::Zero(tr, tr);
    for (int j = 0; j < mk; ++j) {
      Mat kj(rank, tr);
      for (int a = 0; a < rank; ++a) kj.row(a) = iso.row(a * mk + j);
      out += kj.adjoint() * y * kj;
    }
    return Mat(ut * out * ut.adjoint());
  };

  IdempotentSample out;
  out.p_R = ur * ur.adjoint();
  out.homomorphic = homomorphic;
  out.Q = superop_of(d, q_map);
  if (tr > 0) out.S = homomorphic ? superop_of(d, s_hom) : superop_of(d, s_gen);
  out.P = superop_of(d, [&](const Mat& x) {
    const Mat qx = q_map(out.p_R * x * out.p_R);
    if (tr == 0) return qx;
    return Mat(qx + (homomorphic ? s_hom(qx) : s_gen(qx)));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// sum_{n<N} T^n(x), iterating until the increment drops below `eps`.
inline Mat iterate_sum(const QuantumChannel& t, const Mat& x, double eps = 1e-15, long max_terms = 2000000) {
  Mat term = x, sum = Mat::Zero(x.rows(), x.cols());
  for (long n = 0; n < max_terms; ++n) {
    sum += term;
    if (term.norm() < eps) break;
    term = t.apply(term);
  }
  return x.isApprox(x.adjoint()) ? hermitian_part(sum) : sum;
}

/// Limit of windowed averages (1/L) sum_{k<L} T^{n+k}(x); L must be a
/// multiple of every peripheral period. Stops once the average is fixed by T.
inline Mat iterate_limit(const QuantumChannel& t, const Mat& x, int window, double eps = 1e-13, long max_steps = 4000000) {
  Mat cur = x;
  Mat avg = x;
  for (long n = 0; n < max_steps; n += window) {
    avg = Mat::Zero(x.rows(), x.cols());
    for (int k = 0; k < window; ++k) {
      avg += cur;
      cur = t.apply(cur);
    }
    avg /= static_cast<double>(window);
    if (x.isApprox(x.adjoint())) avg = hermitian_part(avg);
    if ((t.apply(avg) - avg).norm() < eps * std::max(1.0, avg.norm())) break;
  }
  return avg;
}

/// Orthonormal basis (as columns) of the range of a superoperator, by SVD.
inline Mat range_columns(const Mat& super, double cut = 1e-9) {
  Eigen::JacobiSVD<Mat> svd(super, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int k = 0;
  while (k < s.size() && s(k) > cut * std::max(1.0, s(0))) ++k;
  return svd.matrixU().leftCols(k);
}

/// Distance of vec(x) from the column span of an orthonormal `cols`.
inline double distance_to_span(const Mat& cols, const Mat& x) {
  const Vec v = kernels::vec(x);
  return (v - cols * (cols.adjoint() * v)).norm();
}

/// Max over basis pairs of the distance of b_i b_j from range(P).
inline double closure_defect(const Mat& p_super, int d) {
  const Mat cols = range_columns(p_super);
  double worst = 0.0;
  for (int i = 0; i < cols.cols(); ++i)
    for (int j = 0; j < cols.cols(); ++j) {
      const Mat x = kernels::unvec(cols.col(i), d);
      const Mat y = kernels::unvec(cols.col(j), d);
      worst = std::max(worst, distance_to_span(cols, x * y));
    }
  return worst;
}

/// Projector onto the intersection of two column spans, via the null space
/// of [A, -B].
inline Mat range_intersection(const Mat& a, const Mat& b) {
  Mat ab(a.rows(), a.cols() + b.cols());
  ab << a, -b;
  Eigen::JacobiSVD<Mat> svd(ab, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  while (rank < s.size() && s(rank) > 1e-9) ++rank;
  const Mat null = svd.matrixV().rightCols(ab.cols() - rank);
  const Mat vecs = a * null.topRows(a.cols());
  if (vecs.cols() == 0) return Mat::Zero(a.rows(), a.rows());
  Eigen::JacobiSVD<Mat> s2(vecs, Eigen::ComputeThinU);
  int r2 = 0;
  while (r2 < s2.singularValues().size() && s2.singularValues()(r2) > 1e-9) ++r2;
  const Mat q = s2.matrixU().leftCols(r2);
  return q * q.adjoint();
}

}  // namespace qmtest
