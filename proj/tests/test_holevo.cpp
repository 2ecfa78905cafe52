#include <doctest.h>

#include <algorithm>

#include "qmarkov/error.hpp"
#include "qmarkov/holevo.hpp"
#include "qmarkov/idempotent.hpp"
#include "support.hpp"

using namespace qmarkov;
using qmtest::Rng;

namespace {

HolevoForm five_level_form() {
  Mat a1 = Mat::Zero(5, 5), a2 = a1, a3 = a1;
  a1(0, 0) = 4; a1(3, 3) = 2; a1(3, 4) = 1; a1(4, 3) = 1; a1(4, 4) = 1;
  a2(1, 1) = 4; a2(3, 3) = 2; a2(3, 4) = -1; a2(4, 3) = -1; a2(4, 4) = 1;
  a3(2, 2) = 4; a3(4, 4) = 2;
  HolevoForm h;
  h.states = {matrix_unit(5, 0, 0), matrix_unit(5, 1, 1), matrix_unit(5, 2, 2)};
  h.effects = {a1 / 4, a2 / 4, a3 / 4};
  return h;
}

// Idempotent measure-and-prepare channel: states with disjoint supports,
// effects a_i with tr(rho_i a_j) = delta_ij.
HolevoForm random_biorthogonal(int d, int n, Rng& r) {
  // support blocks for the states on the first n levels, rest transient
  const Mat u = qmtest::random_unitary(d, r);
  HolevoForm h;
  Mat rest = Mat::Identity(d - n, d - n);
  std::vector<Mat> parts;
  Mat sum = Mat::Zero(d - n, d - n);
  for (int i = 0; i < n; ++i) {
    parts.push_back(qmtest::random_psd(d - n, 1, r) + 0.1 * rest);
    sum += parts.back();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sum);
  const Mat is = es.operatorInverseSqrt();
  for (int i = 0; i < n; ++i) {
    Mat rho = Mat::Zero(d, d);
    rho(i, i) = 1.0;
    Mat a = Mat::Zero(d, d);
    a(i, i) = 1.0;
    a.bottomRightCorner(d - n, d - n) = is * parts[i] * is;
    h.states.push_back(u * rho * u.adjoint());
    h.effects.push_back(u * a * u.adjoint());
  }
  return h;
}

}  // namespace

TEST_CASE("five-level example") {
  const auto h = five_level_form();
  const auto t = QuantumChannel::from_holevo(h);
  REQUIRE(is_idempotent(t));
  const auto c = fixed_commutativity_check(t);
  CHECK(c.compressed_dim == 3);
  CHECK(c.commutative);
  CHECK(c.compressed_residual < 1e-9);
  CHECK(c.uncompressed_residual > 0.1);
  // a1 a2 != a2 a1 directly
  CHECK(frobenius(commutator(h.effects[0], h.effects[1])) > 0.01);

  const auto cert = holevo_from_idempotent(t);
  REQUIRE(cert.form.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(frobenius(cert.form.states[i] - h.states[i]) < 1e-8);
    CHECK(frobenius(cert.form.effects[i] - h.effects[i]) < 1e-8);
  }
  CHECK(verify_uniqueness(cert).passed());
}

TEST_CASE("recovery up to permutation on generated data") {
  Rng r(81);
  for (int trial = 0; trial < 15; ++trial) {
    const int d = r.integer(3, 5), n = r.integer(1, d - 1);
    const auto h = random_biorthogonal(d, n, r);
    const auto t = QuantumChannel::from_holevo(h);
    REQUIRE(is_idempotent(t, Tolerances::uniform(1e-8)));
    const auto cert = holevo_from_idempotent(t, Tolerances::uniform(1e-8), 1000 + trial);
    REQUIRE(cert.form.size() == static_cast<std::size_t>(n));
    CHECK(cert.reconstruction_residual < 1e-8);
    for (int i = 0; i < n; ++i) {
      double best = 1e300;
      for (int j = 0; j < n; ++j)
        best = std::min(best, frobenius(cert.form.states[j] - h.states[i]) + frobenius(cert.form.effects[j] - h.effects[i]));
      CHECK(best < 1e-7);
    }
    CHECK(cert.states_independent);
    CHECK(cert.effects_independent);
    CHECK(verify_uniqueness(cert, Tolerances::uniform(1e-8)).passed());
  }
}

TEST_CASE("non-commutative range is refused") {
  Rng r(82);
  // identity channel on M_2 is idempotent with range M_2
  try {
    holevo_from_idempotent(QuantumChannel::identity_channel(2));
    FAIL("expected RangeNotCommutative");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RangeNotCommutative);
  }
  try {
    fixed_commutativity_check(QuantumChannel::from_kraus(qmtest::random_kraus(2, 2, r)));
    FAIL("expected NotHolevoProvenance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHolevoProvenance);
  }
}

TEST_CASE("uniqueness assertions report a broken certificate") {
  auto h = five_level_form();
  const auto t = QuantumChannel::from_holevo(h);
  auto cert = holevo_from_idempotent(t);
  cert.form.effects[0] = 0.5 * (h.effects[0] + h.effects[1]);
  const auto rep = verify_uniqueness(cert);
  CHECK_FALSE(rep.passed());
  const auto it = std::find_if(rep.assertions.begin(), rep.assertions.end(),
                               [](const Assertion& a) { return a.name == "biorthogonality"; });
  REQUIRE(it != rep.assertions.end());
  CHECK_FALSE(it->passed);
}
