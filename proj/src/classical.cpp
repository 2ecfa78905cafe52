#include "qmarkov/classical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/QR>

#include "qmarkov/ergodic.hpp"

namespace qmarkov {

namespace {

using Graph = std::vector<std::vector<int>>;

Graph edges(const StochasticMatrix& p, const Tolerances& tol) {
  Graph g(p.n());
  for (int i = 0; i < p.n(); ++i)
    for (int j = 0; j < p.n(); ++j)
      if (p(i, j) > tol.psd) g[i].push_back(j);
  return g;
}

// Tarjan's algorithm; returns the component index of every vertex.
std::vector<int> strong_components(const Graph& g, int* count) {
  const int n = static_cast<int>(g.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int next = 0, ncomp = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : g[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  *count = ncomp;
  return comp;
}

// reach[i][j]: j reachable from i in zero or more steps.
std::vector<std::vector<bool>> reachability(const Graph& g) {
  const int n = static_cast<int>(g.size());
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s) {
    std::vector<int> todo{s};
    reach[s][s] = true;
    while (!todo.empty()) {
      const int v = todo.back();
      todo.pop_back();
      for (int w : g[v])
        if (!reach[s][w]) {
          reach[s][w] = true;
          todo.push_back(w);
        }
    }
  }
  return reach;
}

RealVec class_stationary(const StochasticMatrix& p, const std::vector<int>& cls) {
  const int m = static_cast<int>(cls.size());
  RealMat a(m + 1, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) a(r, c) = p(cls[c], cls[r]) - (r == c ? 1.0 : 0.0);
  a.row(m).setOnes();
  RealVec b = RealVec::Zero(m + 1);
  b(m) = 1.0;
  const RealVec pi = a.colPivHouseholderQr().solve(b);
  RealVec full = RealVec::Zero(p.n());
  for (int k = 0; k < m; ++k) full(cls[k]) = pi(k);
  return full;
}

}  // namespace

std::string_view to_string(StateKind k) {
  return k == StateKind::Transient ? "transient" : "positive_recurrent";
}

StochasticMatrix StochasticMatrix::from_rows(const RealMat& p, const Tolerances& tol) {
  // Same checks as the quantum embedding.
  (void)QuantumChannel::from_stochastic(p, tol);
  return StochasticMatrix(p);
}

std::vector<bool> StateClassification::recurrent_mask() const {
  std::vector<bool> m(kind.size());
  for (std::size_t i = 0; i < kind.size(); ++i) m[i] = kind[i] == StateKind::PositiveRecurrent;
  return m;
}

StateClassification classify_states(const StochasticMatrix& p, const Tolerances& tol) {
  const Graph g = edges(p, tol);
  int ncomp = 0;
  const std::vector<int> comp = strong_components(g, &ncomp);

  std::vector<std::vector<int>> members(ncomp);
  for (int i = 0; i < p.n(); ++i) members[comp[i]].push_back(i);
  std::vector<bool> closed(ncomp, true);
  for (int i = 0; i < p.n(); ++i)
    for (int j : g[i])
      if (comp[j] != comp[i]) closed[comp[i]] = false;

  std::vector<int> order(ncomp);
  for (int c = 0; c < ncomp; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return members[a].front() < members[b].front(); });

  StateClassification out;
  out.kind.assign(p.n(), StateKind::Transient);
  for (int c : order) {
    out.classes.push_back(members[c]);
    out.closed.push_back(closed[c]);
    if (closed[c]) {
      for (int i : members[c]) out.kind[i] = StateKind::PositiveRecurrent;
      out.stationary.push_back(class_stationary(p, members[c]));
    } else {
      out.stationary.emplace_back();
    }
  }
  return out;
}

GreenFunction green_function(const StochasticMatrix& p, const RealVec& f, const Tolerances& tol) {
  const int n = p.n();
  if (f.size() != n) throw Error(ErrorKind::DimensionMismatch, "f has the wrong length");
  if (!f.allFinite() || (n > 0 && f.minCoeff() < 0.0)) throw Error(ErrorKind::NegativeInput, "f must be nonnegative");

  const StateClassification cls = classify_states(p, tol);
  const auto reach = reachability(edges(p, tol));
  GreenFunction g;
  g.value = RealVec::Zero(n);
  g.finite.assign(n, true);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (reach[i][j] && cls.kind[j] == StateKind::PositiveRecurrent && f(j) > 0.0) g.finite[i] = false;

  std::vector<int> tr;
  for (int i = 0; i < n; ++i)
    if (cls.kind[i] == StateKind::Transient) tr.push_back(i);
  if (!tr.empty()) {
    const int m = static_cast<int>(tr.size());
    RealMat a(m, m);
    RealVec b(m);
    for (int r = 0; r < m; ++r) {
      b(r) = f(tr[r]);
      for (int c = 0; c < m; ++c) a(r, c) = (r == c ? 1.0 : 0.0) - p(tr[r], tr[c]);
    }
    const RealVec x = a.partialPivLu().solve(b);
    for (int r = 0; r < m; ++r)
      if (g.finite[tr[r]]) g.value(tr[r]) = x(r);
  }
  return g;
}

ClassicalCrossCheck crosscheck_quantum(const StochasticMatrix& p, const Tolerances& tol) {
  const int n = p.n();
  ClassicalCrossCheck out;
  out.classification = classify_states(p, tol);
  const std::vector<bool> rec = out.classification.recurrent_mask();

  const QuantumChannel t = QuantumChannel::from_stochastic(p.matrix(), tol);
  const ErgodicAnalysis an(t, tol);
  const Mat& pr = an.split().p_R.matrix();
  std::vector<bool> tr_mask(n);
  for (int i = 0; i < n; ++i) tr_mask[i] = !rec[i];
  out.p_R_residual = (pr - Projection::diagonal(rec).matrix()).norm();
  out.p_Tr_residual = (an.split().p_Tr.matrix() - Projection::diagonal(tr_mask).matrix()).norm();
  out.spectral_recurrent.resize(n);
  for (int i = 0; i < n; ++i) out.spectral_recurrent[i] = pr(i, i).real() > 0.5;

  // Diagonal compatibility on the basis vectors.
  for (int j = 0; j < n; ++j) {
    const RealVec e = RealVec::Unit(n, j);
    const Mat lhs = t.apply(Mat(e.cast<cplx>().asDiagonal()));
    const RealVec pe = p.matrix() * e;
    const Mat rhs = pe.cast<cplx>().asDiagonal();
    out.diagonal_residual = std::max(out.diagonal_residual, (lhs - rhs).norm());
  }

  // f = sum over transient j of 2^-j chi_j / G(chi_j)(j).
  out.witness = RealVec::Zero(n);
  double weight = 1.0;
  for (int j = 0; j < n; ++j) {
    if (rec[j]) continue;
    weight *= 0.5;
    const GreenFunction gj = green_function(p, RealVec::Unit(n, j), tol);
    out.witness(j) = weight / gj.value(j);
  }
  out.witness_green = green_function(p, out.witness, tol);

  std::ostringstream os;
  const double lim = 10.0 * tol.residual;
  if (out.spectral_recurrent != rec) os << "recurrent sets differ; ";
  if (out.p_R_residual > lim) os << "p_R residual " << out.p_R_residual << "; ";
  if (out.p_Tr_residual > lim) os << "p_Tr residual " << out.p_Tr_residual << "; ";
  if (out.diagonal_residual > lim) os << "diagonal action residual " << out.diagonal_residual << "; ";
  for (int i = 0; i < n; ++i) {
    if (!out.witness_green.finite[i]) {
      os << "G(f) infinite at state " << i << "; ";
      break;
    }
    if (!rec[i] && out.witness_green.value(i) <= 0.0) {
      os << "G(f) vanishes at transient state " << i << "; ";
      break;
    }
  }
  if (os.tellp() > 0) throw Error(ErrorKind::CrossCheckMismatch, os.str());
  return out;
}

}  // namespace qmarkov
