#include <doctest.h>

#include "qmarkov/error.hpp"
#include "qmarkov/idempotent.hpp"
#include "qmarkov/kernels.hpp"
#include "support.hpp"

using namespace qmarkov;
using qmtest::Rng;

namespace {
const Tolerances kTol = Tolerances::uniform(1e-8);

QuantumChannel corner_stochastic() {
  RealMat p(3, 3);
  p << 1, 0, 0, 0, 1, 0, 1.0 / 3, 2.0 / 3, 0;
  return QuantumChannel::from_stochastic(p);
}
}  // namespace

TEST_CASE("stochastic corner example") {
  const auto t = corner_stochastic();
  REQUIRE(is_idempotent(t));
  const auto st = decompose(t);
  CHECK(st.p_R.rank() == 2);
  CHECK(st.S.has_value());
  // Q restricted to diagonal corner inputs is the identity
  for (int i = 0; i < 2; ++i) {
    const Mat e = matrix_unit(3, i, i);
    CHECK(frobenius(apply_super(st.Q, e) - e) < 1e-9);
  }
  Mat in = Mat::Zero(3, 3);
  in(0, 0) = 0.3;
  in(1, 1) = 0.9;
  Mat expect = Mat::Zero(3, 3);
  expect(2, 2) = 0.3 / 3 + 2 * 0.9 / 3;
  CHECK(frobenius(apply_super(*st.S, in) - expect) < 1e-9);
  CHECK_FALSE(is_conditional_expectation(t));
}

TEST_CASE("round trip on generated components") {
  Rng r(61);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 4 + trial % 2;
    const auto smp = qmtest::random_idempotent(d, trial % 3 == 0, r, trial % 7 == 3);
    const auto p_R = Projection::from_matrix(smp.p_R, kTol);
    const auto t = reconstruct(p_R, smp.Q, smp.S, kTol);
    INFO("trial " << trial);
    CHECK((t.super() - smp.P).norm() < 1e-10);
    const auto st = decompose(t, kTol);
    CHECK(frobenius(st.p_R.matrix() - smp.p_R) < 1e-8);
    CHECK((st.Q - smp.Q).norm() < 1e-8);
    CHECK(st.S.has_value() == smp.S.has_value());
    if (smp.S) CHECK((*st.S - *smp.S * smp.Q).norm() < 1e-8);
    const auto again = reconstruct(st.p_R, st.Q, st.S, kTol);
    CHECK((again.super() - t.super()).norm() < 1e-8);
  }
}

TEST_CASE("conditional expectation agrees with brute-force closure") {
  Rng r(62);
  int ce = 0, not_ce = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 4 + trial % 2;
    const auto smp = qmtest::random_idempotent(d, trial % 2 == 0, r);
    const auto t = QuantumChannel::from_superoperator(smp.P, kTol);
    const bool closed = qmtest::closure_defect(smp.P, d) < 1e-8;
    const bool got = is_conditional_expectation(t, kTol);
    CHECK(got == closed);
    if (smp.homomorphic) CHECK(got);
    (got ? ce : not_ce)++;
  }
  CHECK(ce > 0);
  CHECK(not_ce > 0);
}

TEST_CASE("choi-effros product") {
  Rng r(63);
  for (int trial = 0; trial < 10; ++trial) {
    const auto smp = qmtest::random_idempotent(4, false, r);
    const auto t = QuantumChannel::from_superoperator(smp.P, kTol);
    const auto ce = choi_effros(t, kTol);
    CHECK(ce.associativity < 1e-8);
    CHECK(ce.unit_residual < 1e-8);
    CHECK(ce.intertwining < 1e-8);
    // x <> y = P(xy), checked directly
    const int n = static_cast<int>(ce.basis.size());
    Vec cx = Vec::Zero(n), cy = Vec::Zero(n);
    for (int k = 0; k < n; ++k) {
      cx(k) = r.normal();
      cy(k) = r.normal();
    }
    const Mat x = ce.element(cx), y = ce.element(cy);
    CHECK(frobenius(ce.element(ce.multiply(cx, cy)) - apply_super(smp.P, x * y)) < 1e-8);
  }
}

TEST_CASE("invalid components") {
  Rng r(64);
  const auto smp = qmtest::random_idempotent(4, false, r);
  const auto p_R = Projection::from_matrix(smp.p_R, kTol);
  auto expect_invalid = [&](const Mat& q, const std::optional<Mat>& s) {
    try {
      reconstruct(p_R, q, s, kTol);
      FAIL("expected InvalidComponents");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidComponents);
    }
  };
  expect_invalid(smp.Q, std::nullopt);
  expect_invalid(0.5 * smp.Q, smp.S);
  expect_invalid(smp.Q, Mat(2.0 * *smp.S));
  expect_invalid(Mat::Zero(3, 3), smp.S);
}

TEST_CASE("two-level example is idempotent") {
  // T(x) = x_22 1
  const Mat ks[] = {matrix_unit(2, 1, 0), matrix_unit(2, 1, 1)};
  const auto st = decompose(QuantumChannel::from_kraus(ks));
  CHECK(frobenius(st.p_R.matrix() - matrix_unit(2, 1, 1)) < 1e-9);
  REQUIRE(st.S.has_value());
  CHECK(frobenius(apply_super(*st.S, matrix_unit(2, 1, 1)) - matrix_unit(2, 0, 0)) < 1e-9);
}

TEST_CASE("non-idempotent channel is refused") {
  Rng g(65);
  const auto u = QuantumChannel::from_kraus(qmtest::random_kraus(3, 2, g));
  CHECK_FALSE(is_idempotent(u));
  try {
    decompose(u);
    FAIL("expected NotIdempotent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotIdempotent);
  }
}
