#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "errors.hpp"
#include "su_group.hpp"

using namespace qham;

namespace {

Mat diag2(cd a, cd b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("basis is orthonormal and spans the algebra") {
  for (int n : {2, 3, 4}) {
    SuGroup g(n, 1.0);
    REQUIRE(static_cast<int>(g.basis().size()) == n * n - 1);
    for (size_t i = 0; i < g.basis().size(); ++i) {
      CHECK(g.is_algebra_element(g.basis()[i]));
      for (size_t j = 0; j < g.basis().size(); ++j) {
        const double expect = (i == j) ? 1.0 : 0.0;
        CHECK(std::abs(g.pairing(g.basis()[i], g.basis()[j]) - expect) < 1e-12);
      }
    }
  }
}

TEST_CASE("pairing examples") {
  SuGroup g(2, 1.0);
  const Mat zero = Mat::Zero(2, 2);
  CHECK(g.pairing(zero, zero) == 0.0);

  const Mat x = diag2(cd(0, 1), cd(0, -1));
  CHECK(std::abs(g.pairing(x, x) - 2.0) < 1e-14);

  // Ad-invariance at random elements.
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Mat k = g.random_group(rng);
    const Mat a = g.random_algebra(rng);
    const Mat b = g.random_algebra(rng);
    CHECK(std::abs(g.pairing(g.adjoint(k, a), g.adjoint(k, b)) -
                   g.pairing(a, b)) < 1e-12);
  }

  SuGroup scaled(2, 3.5);
  CHECK(std::abs(scaled.pairing(x, x) - 7.0) < 1e-13);

  CHECK_THROWS_AS(g.pairing(Mat::Zero(3, 3), Mat::Zero(3, 3)), Error);
}

TEST_CASE("group_exp basics") {
  SuGroup g(2);
  CHECK((g.group_exp(Mat::Zero(2, 2)) - g.identity()).norm() < 1e-15);

  const Mat x = diag2(cd(0, kPi / 2), cd(0, -kPi / 2));
  CHECK((g.group_exp(x) - diag2(cd(0, 1), cd(0, -1))).norm() < 1e-14);

  Rng rng(5);
  for (int t = 0; t < 25; ++t) {
    const Mat a = g.random_algebra(rng);
    const Mat e = g.group_exp(a);
    CHECK(g.is_group_element(e));
    CHECK((g.group_exp(a) * g.group_exp(-a) - g.identity()).norm() < 1e-12);
  }
}

TEST_CASE("group_log principal branch and traceless bookkeeping") {
  SuGroup g(2);
  CHECK(g.group_log(g.identity()).norm() < 1e-14);

  const Mat lg = g.group_log(diag2(cd(0, 1), cd(0, -1)));
  CHECK((lg - diag2(cd(0, kPi / 2), cd(0, -kPi / 2))).norm() < 1e-13);

  CHECK_THROWS_AS(g.group_log(-g.identity()), Error);

  Rng rng(7);
  for (int t = 0; t < 40; ++t) {
    const Mat e = g.random_group(rng);
    Mat x;
    try {
      x = g.group_log(e);
    } catch (const Error&) {
      continue;  // sampled too close to the cut
    }
    CHECK(g.is_algebra_element(x, 1e-10));
    CHECK((g.group_exp(x) - e).norm() < 1e-10);
  }

  // Phases that sum to a full turn need the 2 pi fold to stay traceless.
  SuGroup g3(3);
  Mat u = Mat::Zero(3, 3);
  u(0, 0) = std::exp(cd(0, 0.9 * kPi));
  u(1, 1) = std::exp(cd(0, 0.9 * kPi));
  u(2, 2) = std::exp(cd(0, 0.2 * kPi));
  const Mat x3 = g3.group_log(u);
  CHECK(std::abs(x3.trace()) < 1e-12);
  CHECK((g3.group_exp(x3) - u).norm() < 1e-12);
}

TEST_CASE("adjoint action") {
  SuGroup g(2);
  Rng rng(3);
  const Mat x = g.random_algebra(rng);
  CHECK((g.adjoint(g.identity(), x) - x).norm() == 0.0);

  // Basis-coordinate matrix of Ad_k is orthogonal for the Gram metric.
  const Mat k = g.random_group(rng);
  const Eigen::MatrixXd ad = g.adjoint_matrix(k);
  CHECK((ad.transpose() * ad - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);

  // g = exp(phi i sigma_3) rotates the (i sigma_1, i sigma_2) plane by 2 phi.
  const double phi = 0.31;
  Mat s3 = diag2(cd(0, 1), cd(0, -1));
  const Mat rot = g.group_exp(phi * s3);
  Mat s1 = Mat::Zero(2, 2);
  s1(0, 1) = cd(0, 1);
  s1(1, 0) = cd(0, 1);
  Mat s2 = Mat::Zero(2, 2);
  s2(0, 1) = cd(1, 0);
  s2(1, 0) = cd(-1, 0);
  const Mat r1 = g.adjoint(rot, s1);
  const Mat expect = std::cos(2 * phi) * s1 - std::sin(2 * phi) * s2;
  CHECK((r1 - expect).norm() < 1e-10);
}

TEST_CASE("alcove embed") {
  SuGroup g(2);
  AlcoveParameter zero{Vec::Zero(2)};
  CHECK((g.alcove_embed(zero) - g.identity()).norm() < 1e-15);

  Vec q(2);
  q << 0.25, -0.25;
  CHECK((g.alcove_embed(AlcoveParameter{q}) - diag2(cd(0, 1), cd(0, -1))).norm() <
        1e-14);

  Vec h(2);
  h << 0.5, -0.5;
  CHECK((g.alcove_embed(AlcoveParameter{h}) + g.identity()).norm() < 1e-14);
}

TEST_CASE("alcove decompose") {
  SuGroup g(2);
  auto [tau0, k0] = g.alcove_decompose(g.identity());
  CHECK(tau0.lambda.norm() < 1e-12);
  CHECK(tau0.valid());

  // Eigenphase sort: diag(-i, i) has alcove label (1/4, -1/4) and a
  // permutation-type conjugator.
  auto [tau, k] = g.alcove_decompose(diag2(cd(0, -1), cd(0, 1)));
  CHECK(std::abs(tau.lambda[0] - 0.25) < 1e-12);
  CHECK(std::abs(tau.lambda[1] + 0.25) < 1e-12);
  CHECK(std::abs(std::abs(k(0, 1)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(k(1, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(k.determinant() - cd(1, 0)) < 1e-12);

  // Round trip over Haar samples, SU(2) and SU(3).
  for (int n : {2, 3}) {
    SuGroup gn(n);
    Rng rng(100 + n);
    for (int t = 0; t < 100; ++t) {
      const Mat u = gn.random_group(rng);
      auto [lam, kk] = gn.alcove_decompose(u);
      CHECK(lam.valid(1e-10));
      CHECK(gn.is_group_element(kk, 1e-11));
      const Mat back = kk * gn.alcove_embed(lam) * kk.adjoint();
      CHECK((back - u).norm() < 1e-10);
    }
  }
}

TEST_CASE("random sampling") {
  SuGroup g(2);

  // Determinism for a fixed seed.
  Rng r1(42), r2(42);
  const Mat a = g.random_group(r1);
  const Mat b = g.random_group(r2);
  CHECK((a - b).norm() == 0.0);

  Rng rng(1);
  Mat mean = Mat::Zero(2, 2);
  const int samples = 10000;
  for (int t = 0; t < samples; ++t) {
    const Mat u = g.random_group(rng);
    CHECK(SuGroup::unitary_defect(u) < 1e-12);
    mean += u;
  }
  mean /= samples;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.05);

  Rng ra(9);
  for (int t = 0; t < 50; ++t) CHECK(g.is_algebra_element(g.random_algebra(ra)));

  for (int n : {2, 3}) {
    SuGroup gn(n);
    Rng rr(77);
    for (int t = 0; t < 50; ++t) {
      const AlcoveParameter tau = gn.random_alcove(rr);
      CHECK(tau.valid());
      CHECK(tau.interior_margin() > 0.0);
    }
  }
}
