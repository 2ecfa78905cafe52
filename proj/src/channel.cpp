#include "qmarkov/channel.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qmarkov/kernels.hpp"

namespace qmarkov {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Superoperator: return "superoperator";
    case Provenance::Kraus: return "kraus";
    case Provenance::Choi: return "choi";
    case Provenance::Holevo: return "holevo";
    case Provenance::Stochastic: return "stochastic";
    case Provenance::Derived: return "derived";
  }
  return "unknown";
}

struct QuantumChannel::Cache {
  std::once_flag choi_once;
  Mat choi;
  std::once_flag kraus_once;
  std::vector<Mat> kraus;
  std::optional<Error> kraus_error;
};

namespace {

int dim_of_super(const Mat& super) {
  if (super.rows() != super.cols()) throw Error(ErrorKind::DimensionMismatch, "superoperator is not square");
  const int n = static_cast<int>(super.rows());
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (d * d != n || d == 0) {
    throw Error(ErrorKind::DimensionMismatch, "superoperator size " + std::to_string(n) + " is not a square d^2");
  }
  return d;
}

}  // namespace

Mat apply_super(const Mat& super, const Mat& x) {
  const int d = static_cast<int>(x.rows());
  if (super.rows() != d * d || x.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "operand does not match superoperator dimension");
  }
  return kernels::unvec(super * kernels::vec(x), d);
}

QuantumChannel::QuantumChannel(Mat super, Provenance provenance, bool validated)
    : dim_(dim_of_super(super)),
      super_(std::move(super)),
      provenance_(provenance),
      validated_(validated),
      cache_(std::make_shared<Cache>()) {
  require_finite(super_, "superoperator");
}

QuantumChannel QuantumChannel::raw(Mat super, Provenance provenance) {
  return QuantumChannel(std::move(super), provenance, false);
}

QuantumChannel QuantumChannel::from_superoperator(Mat super, const Tolerances& tol) {
  QuantumChannel t(std::move(super), Provenance::Superoperator, false);
  t.validate(tol);
  t.validated_ = true;
  return t;
}

QuantumChannel QuantumChannel::from_kraus(std::span<const Mat> kraus, const Tolerances& tol) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus family");
  const int d = static_cast<int>(kraus.front().rows());
  Mat sum = Mat::Zero(d, d);
  for (const auto& k : kraus) {
    require_square(k, d, "Kraus operator");
    require_finite(k, "Kraus operator");
    sum += k.adjoint() * k;
  }
  const double res = (sum - Mat::Identity(d, d)).norm();
  if (res > tol.residual) {
    std::ostringstream os;
    os << "||sum k* k - 1|| = " << res;
    throw Error(ErrorKind::NotUnital, os.str());
  }
  QuantumChannel t(kernels::superop_from_kraus(kraus), Provenance::Kraus, false);
  t.validate(tol);
  t.validated_ = true;
  return t;
}

void HolevoForm::validate(const Tolerances& tol) const {
  if (states.empty() || states.size() != effects.size()) {
    throw Error(ErrorKind::InvalidArgument, "Holevo form needs equally many (>= 1) states and effects");
  }
  const int d = dim();
  Mat sum = Mat::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    require_square(states[i], d, "Holevo state");
    require_square(effects[i], d, "Holevo effect");
    try {
      require_psd(states[i], tol, "Holevo state");
    } catch (const Error& e) {
      throw Error(ErrorKind::NotAState, "state " + std::to_string(i) + ": " + e.what());
    }
    const double tr_err = std::abs(states[i].trace() - 1.0);
    if (tr_err > tol.residual) {
      throw Error(ErrorKind::NotAState, "state " + std::to_string(i) + " has |tr - 1| = " + std::to_string(tr_err));
    }
    require_psd(effects[i], tol, "Holevo effect " + std::to_string(i));
    sum += effects[i];
  }
  const double res = (sum - Mat::Identity(d, d)).norm();
  if (res > tol.residual) {
    throw Error(ErrorKind::EffectsDontSumToIdentity, "||sum a_i - 1|| = " + std::to_string(res));
  }
}

QuantumChannel QuantumChannel::from_holevo_raw(const HolevoForm& form) {
  if (form.states.empty() || form.states.size() != form.effects.size()) {
    throw Error(ErrorKind::InvalidArgument, "Holevo form needs equally many (>= 1) states and effects");
  }
  const int d = form.dim();
  const int n = d * d;
  // T(e_kl) = sum_i rho_i(l,k) a_i, so S = sum_i vec(a_i) vec(rho_i^T)^T.
  Mat s = Mat::Zero(n, n);
  for (std::size_t i = 0; i < form.states.size(); ++i) {
    require_square(form.states[i], d, "Holevo state");
    require_square(form.effects[i], d, "Holevo effect");
    Mat rho_t = form.states[i].transpose();
    s += kernels::vec(form.effects[i]) * kernels::vec(rho_t).transpose();
  }
  QuantumChannel t(std::move(s), Provenance::Holevo, false);
  t.holevo_ = form;
  return t;
}

QuantumChannel QuantumChannel::from_holevo(const HolevoForm& form, const Tolerances& tol) {
  form.validate(tol);
  QuantumChannel t = from_holevo_raw(form);
  t.validate(tol);
  t.validated_ = true;
  return t;
}

QuantumChannel QuantumChannel::from_choi(const Mat& choi, const Tolerances& tol) {
  const int d = dim_of_super(choi);
  require_psd(choi, tol, "Choi matrix");
  QuantumChannel t(kernels::superop_from_choi(choi, d), Provenance::Choi, false);
  t.validate(tol);
  t.validated_ = true;
  return t;
}

QuantumChannel QuantumChannel::from_stochastic(const RealMat& p, const Tolerances& tol) {
  if (p.rows() != p.cols() || p.rows() == 0) throw Error(ErrorKind::NotStochastic, "transition matrix must be square and nonempty");
  if (!p.allFinite()) throw Error(ErrorKind::NotStochastic, "transition matrix has non-finite entries");
  const int n = static_cast<int>(p.rows());
  for (int i = 0; i < n; ++i) {
    if (p.row(i).minCoeff() < -tol.psd) {
      throw Error(ErrorKind::NotStochastic, "negative entry in row " + std::to_string(i));
    }
    const double rs = p.row(i).sum();
    if (std::abs(rs - 1.0) > tol.residual) {
      throw Error(ErrorKind::NotStochastic, "row " + std::to_string(i) + " sums to " + std::to_string(rs));
    }
  }
  Mat s = Mat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i + i * n, j + j * n) = p(i, j);
  QuantumChannel t(std::move(s), Provenance::Stochastic, false);
  t.validate(tol);
  t.validated_ = true;
  return t;
}

QuantumChannel QuantumChannel::identity_channel(int d) {
  if (d <= 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  return QuantumChannel(Mat::Identity(d * d, d * d), Provenance::Superoperator, true);
}

Mat QuantumChannel::apply(const Mat& x) const {
  require_square(x, dim_, "channel operand");
  return apply_super(super_, x);
}

Mat PreAdjoint::apply(const Mat& rho) const {
  require_square(rho, dim, "pre-adjoint operand");
  return apply_super(super, rho);
}

PreAdjoint QuantumChannel::preadjoint() const { return PreAdjoint{super_.adjoint(), dim_}; }

const Mat& QuantumChannel::choi() const {
  std::call_once(cache_->choi_once, [this] { cache_->choi = kernels::choi_from_superop(super_, dim_); });
  return cache_->choi;
}

const std::vector<Mat>& QuantumChannel::kraus(const Tolerances& tol) const {
  std::call_once(cache_->kraus_once, [this, &tol] {
    const Mat& c = choi();
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(c));
    const RealVec& ev = es.eigenvalues();
    if (ev(0) < -tol.psd) {
      cache_->kraus_error = Error(ErrorKind::NotCompletelyPositive,
                                  "Choi matrix has eigenvalue " + std::to_string(ev(0)));
      return;
    }
    const double cut = tol.eigen_cluster * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    for (int k = static_cast<int>(ev.size()) - 1; k >= 0; --k) {
      if (ev(k) <= cut) break;
      // Column of the Choi eigenvector holds (k*)_{a i} at index i d + a.
      const Vec v = es.eigenvectors().col(k) * std::sqrt(ev(k));
      Mat kstar(dim_, dim_);
      for (int i = 0; i < dim_; ++i)
        for (int a = 0; a < dim_; ++a) kstar(a, i) = v(i * dim_ + a);
      cache_->kraus.push_back(kstar.adjoint());
    }
  });
  if (cache_->kraus_error) throw *cache_->kraus_error;
  return cache_->kraus;
}

double QuantumChannel::unital_residual() const {
  return (apply(Mat::Identity(dim_, dim_)) - Mat::Identity(dim_, dim_)).norm();
}

double QuantumChannel::choi_min_eigenvalue() const { return min_eigenvalue(choi()); }

void QuantumChannel::validate(const Tolerances& tol) const {
  const double ures = unital_residual();
  if (ures > tol.residual) {
    std::ostringstream os;
    os << "||T(1) - 1|| = " << ures;
    throw Error(ErrorKind::NotUnital, os.str());
  }
  const double herm = (choi() - choi().adjoint()).norm();
  const double lo = choi_min_eigenvalue();
  if (herm > tol.hermitian || lo < -tol.psd) {
    std::ostringstream os;
    os << "Choi matrix min eigenvalue " << lo << ", Hermiticity defect " << herm;
    throw Error(ErrorKind::NotCompletelyPositive, os.str());
  }
}

void require_markov(const QuantumChannel& t, const Tolerances& tol) {
  tol.validate();
  if (!t.validated()) t.validate(tol);
}

Mat superop_power(const Mat& super, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative channel power");
  Mat result = Mat::Identity(super.rows(), super.cols());
  Mat base = super;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

QuantumChannel compose(const QuantumChannel& t, const QuantumChannel& s) {
  if (t.dim() != s.dim()) throw Error(ErrorKind::DimensionMismatch, "compose: channel dimensions differ");
  Mat prod = t.super() * s.super();
  if (t.validated() && s.validated()) return QuantumChannel::from_superoperator(std::move(prod));
  return QuantumChannel::raw(std::move(prod), Provenance::Derived);
}

QuantumChannel power(const QuantumChannel& t, int n) {
  Mat p = superop_power(t.super(), n);
  if (t.validated()) return QuantumChannel::from_superoperator(std::move(p));
  return QuantumChannel::raw(std::move(p), Provenance::Derived);
}

PptAdvisory ppt_advisory(const QuantumChannel& t, const Tolerances& tol) {
  const int d = t.dim();
  const Mat& c = t.choi();
  // Partial transpose on the first tensor factor.
  Mat pt(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) pt(j * d + a, i * d + b) = c(i * d + a, j * d + b);
  PptAdvisory out;
  out.min_eigenvalue = min_eigenvalue(pt);
  out.ppt = out.min_eigenvalue >= -tol.psd;
  return out;
}

}  // namespace qmarkov
