#include <doctest.h>

#include "qmarkov/classify.hpp"
#include "qmarkov/error.hpp"
#include "support.hpp"

using namespace qmarkov;
using qmtest::Rng;

namespace {

// Random projection whose range mixes a vectors from `inside` and b generic ones.
Projection mixed_projection(const Mat& inside_proj, int a, int b, Rng& r) {
  const int d = static_cast<int>(inside_proj.rows());
  Mat cols(d, a + b);
  if (a > 0) cols.leftCols(a) = inside_proj * qmtest::gaussian(d, a, r);
  if (b > 0) cols.rightCols(b) = qmtest::gaussian(d, b, r);
  return Projection::onto_span(cols);
}

}  // namespace

TEST_CASE("half-filled projection for the two-level example") {
  const Mat ks[] = {matrix_unit(2, 1, 0), matrix_unit(2, 1, 1)};
  const auto t = QuantumChannel::from_kraus(ks);
  const ErgodicAnalysis an(t);
  const auto q = Projection::from_matrix(Mat::Constant(2, 2, 0.5));
  const auto v = classify_projection(an, q);
  CHECK(v.skew_recurrent);
  CHECK_FALSE(v.recurrent);
  CHECK_FALSE(v.transient);
  const auto rep = thm62_crosscheck(an, q);
  CHECK(rep.agree);
  CHECK_FALSE(rep.condition[0]);

  const auto e11 = Projection::from_matrix(matrix_unit(2, 0, 0));
  const auto rep2 = thm62_crosscheck(an, e11);
  CHECK(rep2.agree);
  CHECK(rep2.condition[0]);
  CHECK(classify_projection(an, e11).transient);
}

TEST_CASE("verdicts against the constructed split") {
  Rng r(51);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int d = r.integer(2, 5);
    const auto sc = qmtest::structured_channel(d, r);
    const ErgodicAnalysis an(sc.channel);
    const int tr_rank = d - Projection::from_matrix(sc.p_R, Tolerances::uniform(1e-8)).rank();

    if (tr_rank > 0) {
      const auto p = mixed_projection(sc.p_Tr, r.integer(1, tr_rank), 0, r);
      const auto v = classify_projection(an, p);
      CHECK(v.transient);
      CHECK(is_superharmonic(sc.channel, sc.p_Tr));
    }
    const auto pr = mixed_projection(sc.p_R, 1, 0, r);
    const auto v = classify_projection(an, pr);
    CHECK(v.recurrent);
    CHECK(v.positive_recurrent);
    CHECK(v.skew_recurrent);
    CHECK(is_subharmonic(sc.channel, sc.p_R));

    // generic projection: skew recurrence iff range(p) misses range(p_Tr)
    const auto g = mixed_projection(sc.p_Tr, 0, r.integer(1, d - 1), r);
    const Mat inter = qmtest::range_intersection(g.range_basis(), Projection::from_matrix(sc.p_Tr, Tolerances::uniform(1e-8)).range_basis());
    CHECK(classify_projection(an, g).skew_recurrent == (frobenius(inter) < 0.5));
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("thm62 conditions agree on random projections") {
  Rng r(52);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = r.integer(2, 5);
    const auto sc = qmtest::structured_channel(d, r);
    const ErgodicAnalysis an(sc.channel);
    const int tr_rank = d - Projection::from_matrix(sc.p_R, Tolerances::uniform(1e-8)).rank();
    Projection p;
    switch (trial % 3) {
      case 0: p = tr_rank > 0 ? mixed_projection(sc.p_Tr, r.integer(1, tr_rank), 0, r) : an.split().p_Tr; break;
      case 1: p = mixed_projection(sc.p_R, 1, 0, r); break;
      default: p = mixed_projection(sc.p_R, 0, 1, r); break;
    }
    const auto rep = thm62_crosscheck(an, p);
    INFO("trial " << trial);
    CHECK(rep.agree);
    CHECK(rep.condition[0] == classify_projection(an, p).transient);
  }
}

TEST_CASE("haag criterion against iterated averages") {
  Rng r(53);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = r.integer(2, 4);
    const auto sc = qmtest::structured_channel(d, r);
    const ErgodicAnalysis an(sc.channel);
    const Vec xi = qmtest::random_unit_vector(d, r);
    const Mat t = xi * xi.adjoint();
    const Mat lim = qmtest::iterate_limit(sc.channel, t, sc.period);
    const double oracle = (xi.adjoint() * lim * xi)(0, 0).real();
    const auto h = haag_criterion(an, xi, 2000);
    CHECK(std::abs(h.exact - oracle) < 1e-8);
    CHECK(std::abs(h.empirical - h.exact) < 0.05 * (1.0 + h.exact));
    CHECK(h.consistent);
  }
  const auto sc = qmtest::structured_channel(3, r);
  Vec bad = Vec::Ones(3);
  CHECK_THROWS_AS(haag_criterion(sc.channel, bad, 10), Error);
}

TEST_CASE("transient vectors give a vanishing limit") {
  Rng r(54);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sc = qmtest::structured_channel(4, r);
    if (frobenius(sc.p_Tr) < 0.5) continue;
    Vec xi = sc.p_Tr * qmtest::random_unit_vector(4, r);
    xi /= xi.norm();
    const auto h = haag_criterion(sc.channel, xi, 100);
    CHECK_FALSE(h.positive);
    CHECK_FALSE(h.outside_transient);
  }
}

TEST_CASE("lattice and fixedness checks") {
  Rng r(55);
  for (int trial = 0; trial < 15; ++trial) {
    const int d = r.integer(2, 5);
    const auto sc = qmtest::structured_channel(d, r);
    const ErgodicAnalysis an(sc.channel);
    const Projection ps[] = {an.split().p_Tr, an.split().p_Tr};
    CHECK(superharmonic_lattice_check(sc.channel, ps) < 1e-9);

    // recurrent p: p T(a) p = p a p for superharmonic a
    const auto p = mixed_projection(sc.p_R, 1, 0, r);
    const Mat c = qmtest::random_psd(d, 2, r);
    const Mat a = qmtest::iterate_sum(sc.channel, sc.p_Tr * c * sc.p_Tr) + Mat::Identity(d, d);
    const Mat as[] = {a, sc.p_Tr};
    CHECK(recurrence_fixedness_check(an, p, as) < 1e-8);

    std::vector<Mat> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(qmtest::gaussian(d, d, r));
    CHECK(subharmonic_projection_identity_check(sc.channel, an.split().p_R, xs) < 1e-9);
  }
}

TEST_CASE("precondition errors") {
  Rng r(56);
  const Mat ks[] = {matrix_unit(2, 1, 0), matrix_unit(2, 1, 1)};
  const auto t = QuantumChannel::from_kraus(ks);
  const ErgodicAnalysis an(t);
  const auto e11 = Projection::from_matrix(matrix_unit(2, 0, 0));
  const Mat as[] = {Mat::Identity(2, 2)};
  try {
    recurrence_fixedness_check(an, e11, as);
    FAIL("expected NotRecurrent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotRecurrent);
  }
  std::vector<Mat> xs = {Mat::Identity(2, 2)};
  try {
    subharmonic_projection_identity_check(t, e11, xs);
    FAIL("expected NotSubharmonic");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSubharmonic);
  }
}
