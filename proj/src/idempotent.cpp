#include "qmarkov/idempotent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmarkov/kernels.hpp"

namespace qmarkov {

namespace {

Mat choi_rect(const Mat& r, int din, int dout) {
  Mat c(din * dout, din * dout);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j)
      for (int a = 0; a < dout; ++a)
        for (int b = 0; b < dout; ++b) c(i * dout + a, j * dout + b) = r(a + b * dout, i + j * din);
  return c;
}

double corner_choi_min(const Mat& m, const Projection& in, const Projection& out) {
  if (in.is_zero() || out.is_zero()) return 0.0;
  const Mat v = in.range_basis();
  const Mat w = out.range_basis();
  const Mat c = choi_rect(kernels::restrict_map(m, v, w), in.rank(), out.rank());
  return min_eigenvalue(hermitian_part(c));
}

Mat super_identity(int d) { return Mat::Identity(d * d, d * d); }

IdempotentChecks component_checks(const Projection& p_R, const Projection& p_Tr, const Mat& q,
                                  const std::optional<Mat>& s, const Mat& p, const Tolerances& tol) {
  const int d = p_R.dim();
  const Mat l_r = kernels::sandwich(p_R.matrix(), p_R.matrix());
  const Mat l_tr = kernels::sandwich(p_Tr.matrix(), p_Tr.matrix());
  IdempotentChecks c;
  c.idempotent = (p * p - p).norm();
  c.q_corner = (q - l_r * q * l_r).norm();
  c.q_idempotent = (q * q - q).norm();
  c.q_unital = (apply_super(q, p_R.matrix()) - p_R.matrix()).norm();
  c.q_choi_min = corner_choi_min(q, p_R, p_R);
  if (!p_R.is_zero()) {
    const Mat v = p_R.range_basis();
    const Mat dens = apply_super(q.adjoint(), p_R.matrix()) / static_cast<double>(p_R.rank());
    c.q_faithful_min = min_eigenvalue(hermitian_part(v.adjoint() * dens * v));
  }
  const Mat sq = s ? Mat(*s * q) : Mat::Zero(d * d, d * d);
  if (s) {
    c.s_unital = (apply_super(*s, p_R.matrix()) - p_Tr.matrix()).norm();
    c.s_support = (sq - l_tr * sq).norm();
    c.s_choi_min = corner_choi_min(sq, p_R, p_Tr);
  }
  c.reconstruction = (p - (q + sq) * l_r).norm();
  c.transient_image = apply_super(p, p_Tr.matrix()).norm();
  c.compression = (p - p * l_r).norm();
  c.range_split = ((super_identity(d) - l_r - l_tr) * p).norm();
  double worst = 0.0;
  for (const auto& x : range_basis(q, d, tol)) {
    const Mat sx = s ? apply_super(*s, x) : zeros(d);
    worst = std::max(worst, (apply_super(p, x) - x - sx).norm());
  }
  c.corner_identity = worst;
  return c;
}

// First failing invariant, or empty.
std::string first_violation(const IdempotentChecks& c, bool has_s, const Tolerances& tol) {
  const double lim = 10.0 * tol.residual;
  std::ostringstream os;
  auto over = [&](const char* what, double v) {
    if (v > lim && os.tellp() == 0) os << what << " residual " << v;
  };
  over("Q corner support", c.q_corner);
  over("Q idempotency", c.q_idempotent);
  over("Q unitality", c.q_unital);
  if (c.q_choi_min < -tol.psd && os.tellp() == 0) os << "Q not completely positive, Choi min eig " << c.q_choi_min;
  if (c.q_faithful_min <= tol.eigen_cluster && os.tellp() == 0)
    os << "Q not faithful, min eig of Q_*(p_R/r) " << c.q_faithful_min;
  if (has_s) {
    over("S range in p_Tr corner", c.s_support);
    over("S unitality", c.s_unital);
    if (c.s_choi_min < -tol.psd && os.tellp() == 0) os << "S not completely positive, Choi min eig " << c.s_choi_min;
  }
  over("idempotency", c.idempotent);
  over("reconstruction", c.reconstruction);
  over("P(p_Tr) = 0", c.transient_image);
  over("P = P(p_R . p_R)", c.compression);
  over("range splitting", c.range_split);
  over("P(x) = x + S(x)", c.corner_identity);
  return os.str();
}

void require_idempotent(const QuantumChannel& p, const Tolerances& tol) {
  require_markov(p, tol);
  const double r = (p.super() * p.super() - p.super()).norm();
  if (r > tol.residual) throw Error(ErrorKind::NotIdempotent, "||P o P - P|| = " + std::to_string(r));
}

}  // namespace

std::vector<Mat> range_basis(const Mat& super, int d, const Tolerances& tol) {
  std::vector<Mat> images;
  images.reserve(static_cast<std::size_t>(d) * d);
  for (int k = 0; k < d * d; ++k) {
    if (super.col(k).norm() == 0.0) continue;
    images.push_back(kernels::unvec(super.col(k), d));
  }
  return hermitian_basis(images, tol);
}

bool is_idempotent(const QuantumChannel& t, const Tolerances& tol) {
  require_markov(t, tol);
  return (t.super() * t.super() - t.super()).norm() <= tol.residual;
}

IdempotentStructure decompose(const QuantumChannel& p, const Tolerances& tol) {
  require_idempotent(p, tol);
  const ErgodicAnalysis an(p, tol);
  const int d = p.dim();
  IdempotentStructure out;
  out.channel = p.super();
  out.p_R = an.split().p_R;
  out.p_Tr = an.split().p_Tr;
  const Mat l_r = kernels::sandwich(out.p_R.matrix(), out.p_R.matrix());
  out.Q = l_r * p.super() * l_r;
  if (!out.p_R.is_identity()) {
    const Mat l_tr = kernels::sandwich(out.p_Tr.matrix(), out.p_Tr.matrix());
    out.S = l_tr * p.super() * l_r;
  }
  out.q_range_basis = range_basis(out.Q, d, tol);
  out.checks = component_checks(out.p_R, out.p_Tr, out.Q, out.S, p.super(), tol);
  const std::string bad = first_violation(out.checks, out.S.has_value(), tol);
  if (!bad.empty()) throw Error(ErrorKind::InvariantViolation, "decomposition: " + bad);
  return out;
}

QuantumChannel reconstruct(const Projection& p_R, const Mat& q, const std::optional<Mat>& s, const Tolerances& tol) {
  const int d = p_R.dim();
  if (q.rows() != d * d || q.cols() != d * d) throw Error(ErrorKind::InvalidComponents, "Q has the wrong shape");
  if (s && (s->rows() != d * d || s->cols() != d * d)) throw Error(ErrorKind::InvalidComponents, "S has the wrong shape");
  if (p_R.is_zero()) throw Error(ErrorKind::InvalidComponents, "p_R is zero");
  if (p_R.is_identity() && s && s->norm() > tol.residual)
    throw Error(ErrorKind::InvalidComponents, "S must be empty when p_R = 1");
  if (!p_R.is_identity() && !s) throw Error(ErrorKind::InvalidComponents, "S is required when p_R != 1");

  const Projection p_Tr = p_R.complement();
  const Mat l_r = kernels::sandwich(p_R.matrix(), p_R.matrix());
  const std::optional<Mat> s_eff = p_R.is_identity() ? std::nullopt : s;
  const Mat sq = s_eff ? Mat(*s_eff * q) : Mat::Zero(d * d, d * d);
  const Mat p = (q + sq) * l_r;

  const IdempotentChecks c = component_checks(p_R, p_Tr, q, s_eff, p, tol);
  const std::string bad = first_violation(c, s_eff.has_value(), tol);
  if (!bad.empty()) throw Error(ErrorKind::InvalidComponents, bad);
  return QuantumChannel::from_superoperator(p, tol);
}

CondExpReport conditional_expectation_report(const QuantumChannel& p, const Tolerances& tol) {
  const IdempotentStructure st = decompose(p, tol);
  const int d = p.dim();
  CondExpReport r;
  if (st.S) {
    const Mat& s = *st.S;
    for (const auto& x : st.q_range_basis) {
      const Mat sx = apply_super(s, x);
      r.homomorphism_residual =
          std::max(r.homomorphism_residual, (apply_super(s, x.adjoint()) - sx.adjoint()).norm());
      for (const auto& y : st.q_range_basis) {
        r.homomorphism_residual =
            std::max(r.homomorphism_residual, (apply_super(s, x * y) - sx * apply_super(s, y)).norm());
      }
    }
  }
  const std::vector<Mat> range = range_basis(p.super(), d, tol);
  for (const auto& x : range)
    for (const auto& y : range) r.closure_residual = std::max(r.closure_residual, expand(x * y, range).residual);
  r.homomorphism = r.homomorphism_residual <= tol.residual;
  r.closed = r.closure_residual <= tol.residual;
  return r;
}

bool is_conditional_expectation(const QuantumChannel& p, const Tolerances& tol) {
  const CondExpReport r = conditional_expectation_report(p, tol);
  if (r.homomorphism != r.closed) {
    std::ostringstream os;
    os << "S homomorphism residual " << r.homomorphism_residual << " vs range closure residual "
       << r.closure_residual;
    throw Error(ErrorKind::CrossCheckMismatch, os.str());
  }
  return r.homomorphism;
}

Mat ChoiEffrosAlgebra::element(const Vec& coords) const {
  Mat x = Mat::Zero(basis.front().rows(), basis.front().cols());
  for (std::size_t k = 0; k < basis.size(); ++k) x += coords(static_cast<Eigen::Index>(k)) * basis[k];
  return x;
}

Vec ChoiEffrosAlgebra::multiply(const Vec& x, const Vec& y) const {
  Vec out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out(static_cast<Eigen::Index>(k)) = x.transpose() * structure[k] * y;
  return out;
}

ChoiEffrosAlgebra choi_effros(const QuantumChannel& p, const Tolerances& tol) {
  const IdempotentStructure st = decompose(p, tol);
  const int d = p.dim();
  const Mat& pr = st.p_R.matrix();
  ChoiEffrosAlgebra ce;
  ce.basis = range_basis(p.super(), d, tol);
  const int n = static_cast<int>(ce.basis.size());
  ce.structure.assign(n, Mat::Zero(n, n));

  std::vector<std::vector<Mat>> prod(n, std::vector<Mat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      prod[i][j] = p.apply(ce.basis[i] * ce.basis[j]);
      for (int k = 0; k < n; ++k) ce.structure[k](i, j) = hs_inner(ce.basis[k], prod[i][j]);
    }

  const Mat one = identity(d);
  ce.unit = Vec(n);
  for (int k = 0; k < n; ++k) ce.unit(k) = hs_inner(ce.basis[k], one);
  ce.unit_residual = std::max((p.apply(one) - one).norm(), (ce.element(ce.unit) - one).norm());

  // Left multiplication matrices: (L_i)(k, j) = c_ijk; associativity is
  // L_{b_i <> b_j} = L_i L_j.
  std::vector<Mat> left(n, Mat(n, n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) left[i].row(k) = ce.structure[k].row(i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat lij = Mat::Zero(n, n);
      for (int m = 0; m < n; ++m) lij += ce.structure[m](i, j) * left[m];
      ce.associativity = std::max(ce.associativity, (lij - left[i] * left[j]).norm());
    }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ce.involution = std::max(ce.involution, (prod[i][j].adjoint() - prod[j][i]).norm());
      const Mat xq = pr * ce.basis[i] * pr;
      const Mat yq = pr * ce.basis[j] * pr;
      ce.intertwining = std::max(ce.intertwining, (pr * prod[i][j] * pr - xq * yq).norm());
      Mat formula = xq * yq;
      if (st.S) formula += apply_super(*st.S, xq * yq);
      ce.product_formula = std::max(ce.product_formula, (prod[i][j] - formula).norm());
    }

  auto cstar = [&](const Mat& x) {
    const double lhs = op_norm(pr * p.apply(x.adjoint() * x) * pr);
    const double nx = op_norm(pr * x * pr);
    return std::abs(lhs - nx * nx);
  };
  for (int i = 0; i < n; ++i) {
    ce.cstar_identity = std::max(ce.cstar_identity, cstar(ce.basis[i]));
    for (int j = i + 1; j < n; ++j)
      ce.cstar_identity = std::max(ce.cstar_identity, cstar(ce.basis[i] + cplx(0, 1) * ce.basis[j]));
  }

  const double lim = 10.0 * tol.residual;
  std::ostringstream os;
  if (ce.associativity > lim) os << "associativity " << ce.associativity << "; ";
  if (ce.involution > lim) os << "involution " << ce.involution << "; ";
  if (ce.intertwining > lim) os << "compression intertwining " << ce.intertwining << "; ";
  if (ce.product_formula > lim) os << "product formula " << ce.product_formula << "; ";
  if (ce.cstar_identity > lim) os << "C*-identity " << ce.cstar_identity << "; ";
  if (os.tellp() > 0) throw Error(ErrorKind::InvariantViolation, "Choi-Effros product: " + os.str());
  return ce;
}

}  // namespace qmarkov
