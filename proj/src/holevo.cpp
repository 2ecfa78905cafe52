#include "qmarkov/holevo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qmarkov/kernels.hpp"
#include "qmarkov/poisson.hpp"

namespace qmarkov {

namespace {

constexpr int kDiagonalisationAttempts = 8;

double max_commutator(const std::vector<Mat>& xs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) worst = std::max(worst, commutator(xs[i], xs[j]).norm());
  return worst;
}

double gram_min(const std::vector<Mat>& xs) {
  if (xs.empty()) return 0.0;
  return min_eigenvalue(hermitian_part(kernels::gram(xs)));
}

// Minimal projections of a commutative *-algebra given by a Hermitian basis
// (r x r matrices). Empty if the random combination was degenerate.
std::vector<Mat> minimal_projections(const std::vector<Mat>& basis, std::mt19937_64& rng, const Tolerances& tol) {
  const int r = static_cast<int>(basis.front().rows());
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Mat h = Mat::Zero(r, r);
  for (const auto& b : basis) h += coef(rng) * b;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  const RealVec& ev = es.eigenvalues();
  const double gap = 1e-7 * std::max(1.0, ev.cwiseAbs().maxCoeff());

  std::vector<Mat> blocks;
  int start = 0;
  for (int k = 1; k <= r; ++k) {
    if (k < r && ev(k) - ev(k - 1) <= gap) continue;
    const Mat u = es.eigenvectors().middleCols(start, k - start);
    blocks.push_back(u * u.adjoint());
    start = k;
  }
  if (blocks.size() != basis.size()) return {};
  // Every basis element must act as a scalar on each block.
  const double lim = 10.0 * tol.residual;
  for (const auto& p : blocks) {
    const double rank = p.trace().real();
    for (const auto& b : basis) {
      const cplx c = (p * b).trace() / rank;
      if ((p * b * p - c * p).norm() > lim || commutator(p, b).norm() > lim) return {};
    }
  }
  return blocks;
}

int first_support_index(const Projection& p) {
  const auto diag = p.matrix().diagonal().real();
  Eigen::Index idx = 0;
  diag.maxCoeff(&idx);
  for (int i = 0; i < diag.size(); ++i)
    if (diag(i) > 0.5 * diag(idx)) return i;
  return static_cast<int>(idx);
}

}  // namespace

CommutativityReport fixed_commutativity_check(const QuantumChannel& t, const Tolerances& tol) {
  if (!t.holevo_form()) throw Error(ErrorKind::NotHolevoProvenance, "channel was not built from Holevo data");
  const ErgodicAnalysis an(t, tol);
  CommutativityReport r;
  const std::vector<Mat> compressed = compressed_fixed_algebra(an);
  r.compressed_dim = static_cast<int>(compressed.size());
  r.compressed_residual = max_commutator(compressed);
  r.uncompressed_residual = max_commutator(fixed_space(t, tol).basis);
  r.commutative = r.compressed_residual <= tol.residual;
  return r;
}

HolevoCertificate holevo_from_idempotent(const QuantumChannel& p, const Tolerances& tol, unsigned long long seed) {
  const IdempotentStructure st = decompose(p, tol);
  const double comm = max_commutator(st.q_range_basis);
  if (comm > tol.residual) {
    throw Error(ErrorKind::RangeNotCommutative, "max ||[x, y]|| on p_R P(A) p_R = " + std::to_string(comm));
  }

  const Mat v = st.p_R.range_basis();
  std::vector<Mat> corner;
  for (const auto& b : st.q_range_basis) corner.push_back(v.adjoint() * b * v);

  std::mt19937_64 rng(seed);
  std::vector<Mat> blocks;
  for (int attempt = 0; attempt < kDiagonalisationAttempts && blocks.empty(); ++attempt)
    blocks = minimal_projections(corner, rng, tol);
  if (blocks.empty()) {
    throw Error(ErrorKind::InvariantViolation, "simultaneous diagonalisation of p_R P(A) p_R failed");
  }

  std::vector<Projection> ps;
  for (const auto& b : blocks) ps.push_back(Projection::from_matrix(v * b * v.adjoint(), tol));
  std::sort(ps.begin(), ps.end(),
            [](const Projection& a, const Projection& b) { return first_support_index(a) < first_support_index(b); });

  HolevoCertificate cert;
  const Mat pre = p.super().adjoint();
  for (const auto& pk : ps) {
    const Mat rho = hermitian_part(apply_super(pre, pk.matrix())) / static_cast<double>(pk.rank());
    cert.form.states.push_back(rho);
    cert.form.effects.push_back(hermitian_part(p.apply(pk.matrix())));
  }
  cert.minimal_projections = ps;

  const int n = static_cast<int>(ps.size());
  cert.biorthogonality = RealMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cert.biorthogonality(i, j) = (cert.form.states[i] * cert.form.effects[j]).trace().real();
  cert.states_gram_min = gram_min(cert.form.states);
  cert.effects_gram_min = gram_min(cert.form.effects);
  cert.states_independent = cert.states_gram_min > tol.eigen_cluster;
  cert.effects_independent = cert.effects_gram_min > tol.eigen_cluster;
  cert.reconstruction_residual = (QuantumChannel::from_holevo_raw(cert.form).super() - p.super()).norm();
  if (cert.reconstruction_residual > 10.0 * tol.residual) {
    throw Error(ErrorKind::InvariantViolation,
                "Holevo form does not reproduce P: residual " + std::to_string(cert.reconstruction_residual));
  }
  return cert;
}

bool UniquenessReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

UniquenessReport verify_uniqueness(const HolevoCertificate& cert, const Tolerances& tol) {
  UniquenessReport rep;
  const auto& states = cert.form.states;
  const auto& effects = cert.form.effects;
  const int n = static_cast<int>(states.size());
  auto add = [&](std::string name, double residual, std::string witness) {
    rep.assertions.push_back(Assertion{std::move(name), residual <= tol.residual, residual, std::move(witness)});
  };
  if (n == 0 || static_cast<int>(effects.size()) != n) {
    rep.assertions.push_back(Assertion{"shape", false, 0.0, "states and effects must be non-empty and paired"});
    return rep;
  }
  const int d = static_cast<int>(states.front().rows());

  {
    Mat sum = zeros(d);
    for (const auto& a : effects) sum += a;
    add("effects_sum_to_identity", (sum - identity(d)).norm(), "");
  }
  {
    double worst = 0.0;
    int wi = 0, wj = 0;
    double wv = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = (states[i] * effects[j]).trace().real();
        const double dev = std::abs(v - (i == j ? 1.0 : 0.0));
        if (dev > worst) {
          worst = dev;
          wi = i;
          wj = j;
          wv = v;
        }
      }
    std::ostringstream os;
    os << "phi_" << wi + 1 << "(a_" << wj + 1 << ") = " << wv;
    add("biorthogonality", worst, worst > 0.0 ? os.str() : "");
  }

  const QuantumChannel p = QuantumChannel::from_holevo_raw(cert.form);
  const Mat pre = p.super().adjoint();
  {
    double worst = 0.0;
    for (const auto& a : effects) worst = std::max(worst, (p.apply(a) - a).norm());
    add("effects_fixed", worst, "");
  }
  {
    double worst = 0.0;
    for (const auto& rho : states) worst = std::max(worst, (apply_super(pre, rho) - rho).norm());
    add("states_stationary", worst, "");
  }

  std::vector<Projection> supports;
  try {
    for (const auto& rho : states) supports.push_back(support_projection(rho, tol));
  } catch (const Error& e) {
    rep.assertions.push_back(Assertion{"support_orthogonality", false, 0.0, e.what()});
    return rep;
  }
  {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        worst = std::max(worst, (supports[i].matrix() * supports[j].matrix()).norm());
    add("support_orthogonality", worst, "");
  }
  try {
    const ErgodicAnalysis an(p, tol);
    Mat sum = zeros(d);
    for (const auto& s : supports) sum += s.matrix();
    add("supports_sum_to_p_R", (sum - an.split().p_R.matrix()).norm(), "");
  } catch (const Error& e) {
    rep.assertions.push_back(Assertion{"supports_sum_to_p_R", false, 0.0, e.what()});
  }
  return rep;
}

}  // namespace qmarkov
