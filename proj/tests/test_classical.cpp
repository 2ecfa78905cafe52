#include <doctest.h>

#include "qmarkov/classical.hpp"
#include "qmarkov/error.hpp"
#include "support.hpp"

using namespace qmarkov;
using qmtest::Rng;

namespace {

// Reachability by repeated boolean squaring; a state is recurrent iff every
// state it reaches reaches it back.
std::vector<bool> recurrent_by_reachability(const RealMat& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < n; ++j)
      if (p(i, j) > 0) reach[i][j] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<bool> rec(n, true);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (reach[i][j] && !reach[j][i]) rec[i] = false;
  return rec;
}

}  // namespace

TEST_CASE("corner chain") {
  RealMat p(3, 3);
  p << 1, 0, 0, 0, 1, 0, 1.0 / 3, 2.0 / 3, 0;
  const auto sp = StochasticMatrix::from_rows(p);
  const auto c = classify_states(sp);
  CHECK(c.kind[0] == StateKind::PositiveRecurrent);
  CHECK(c.kind[1] == StateKind::PositiveRecurrent);
  CHECK(c.kind[2] == StateKind::Transient);
  CHECK(c.classes.size() == 3);
  const auto x = crosscheck_quantum(sp);
  CHECK(x.spectral_recurrent == std::vector<bool>{true, true, false});
  CHECK(x.p_R_residual < 1e-9);
}

TEST_CASE("classification against reachability") {
  Rng r(91);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = r.integer(1, 8);
    const RealMat p = qmtest::random_stochastic(n, r);
    const auto c = classify_states(StochasticMatrix::from_rows(p));
    CHECK(c.recurrent_mask() == recurrent_by_reachability(p));
    for (std::size_t k = 0; k < c.classes.size(); ++k) {
      if (!c.closed[k]) continue;
      const RealVec& pi = c.stationary[k];
      CHECK((pi.transpose() * p - pi.transpose()).norm() < 1e-10);
      CHECK(std::abs(pi.sum() - 1.0) < 1e-10);
      CHECK(pi.minCoeff() > -1e-12);
    }
  }
}

TEST_CASE("green function against truncated sums") {
  Rng r(92);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = r.integer(2, 7);
    const RealMat p = qmtest::random_stochastic(n, r);
    const auto sp = StochasticMatrix::from_rows(p);
    const auto rec = classify_states(sp).recurrent_mask();
    RealVec f = RealVec::Zero(n);
    for (int i = 0; i < n; ++i)
      if (!rec[i] || r.coin(0.3)) f(i) = r.uniform(0.2, 1.0);
    const auto g = green_function(sp, f);
    // oracle: partial sums; finite entries converge, infinite ones grow
    RealVec term = f, sum = RealVec::Zero(n);
    for (int k = 0; k < 20000; ++k) {
      sum += term;
      term = p * term;
    }
    for (int i = 0; i < n; ++i) {
      if (g.finite[i]) {
        CHECK(std::abs(sum(i) - g.value(i)) < 1e-6 * (1.0 + g.value(i)));
      } else {
        CHECK(sum(i) > 10.0);
      }
    }
  }
}

TEST_CASE("crosscheck on random chains") {
  Rng r(93);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = r.integer(1, 6);
    const auto sp = StochasticMatrix::from_rows(qmtest::random_stochastic(n, r));
    const auto x = crosscheck_quantum(sp);
    CHECK(x.spectral_recurrent == x.classification.recurrent_mask());
    CHECK(x.diagonal_residual < 1e-12);
    const auto rec = x.classification.recurrent_mask();
    for (int i = 0; i < n; ++i) {
      CHECK(x.witness_green.finite[i]);
      if (!rec[i]) CHECK(x.witness(i) > 0.0);
    }
  }
}

TEST_CASE("input errors") {
  RealMat bad(2, 2);
  bad << 0.5, 0.4, 0.0, 1.0;
  CHECK_THROWS_AS(StochasticMatrix::from_rows(bad), Error);
  RealMat p(2, 2);
  p << 0.5, 0.5, 0.0, 1.0;
  const auto sp = StochasticMatrix::from_rows(p);
  RealVec neg(2);
  neg << -1.0, 0.0;
  try {
    green_function(sp, neg);
    FAIL("expected NegativeInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeInput);
  }
  CHECK_THROWS_AS(green_function(sp, RealVec::Ones(3)), Error);
}
