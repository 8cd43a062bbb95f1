#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "axiom_check.hpp"
#include "catalog.hpp"
#include "errors.hpp"
#include "fusion.hpp"
#include "su_group.hpp"

using namespace qham;

namespace {

AlcoveParameter su2_tau(double t) {
  Vec v(2);
  v << t, -t;
  return AlcoveParameter{v};
}

AlcoveParameter su3_tau(double a, double b) {
  Vec v(3);
  v << a, b, -(a + b);
  std::sort(v.data(), v.data() + 3, std::greater<double>());
  return AlcoveParameter{v};
}

}  // namespace

TEST_CASE("constant-coordinate bracket sign calibration") {
  SuGroup g2(2), g3(3);
  Rng rng(13);
  CHECK(std::abs(calibrate_bracket_sign(g2, rng) - kBracketSign) < 1e-4);
  CHECK(std::abs(calibrate_bracket_sign(g3, rng) - kBracketSign) < 1e-4);
}

TEST_CASE("conjugacy class moment and the two form presentations") {
  SuGroup g(2);
  const auto cls = conjugacy_class(&g, su2_tau(0.17));
  Rng rng(2);
  const Point p = sample_point(*cls, rng);
  const Mat k = std::get<Mat>(p.slots[0]);

  // Moment is the embedded class point.
  const Mat f = moment_of(*cls, p)[0];
  CHECK((f - k * g.alcove_embed(su2_tau(0.17)) * k.adjoint()).norm() < 1e-13);

  // Central class: zero form, identity moment.
  const auto point_cls = conjugacy_class(&g, su2_tau(0.0));
  const Point pc = sample_point(*point_cls, rng);
  CHECK((moment_of(*point_cls, pc)[0] - g.identity()).norm() < 1e-13);
  const Tangent u0 = random_tangent(*point_cls, rng);
  const Tangent v0 = random_tangent(*point_cls, rng);
  CHECK(std::abs(eval_form(*point_cls, pc, u0, v0)) < 1e-14);

  // The class form against its chart presentation, on random data.
  for (int t = 0; t < 25; ++t) {
    const Point q = sample_point(*cls, rng);
    const Mat kk = std::get<Mat>(q.slots[0]);
    const Tangent u = random_tangent(*cls, rng);
    const Tangent v = random_tangent(*cls, rng);
    const double lhs = eval_form(*cls, q, u, v);
    const Mat xi_u = kk.adjoint() * std::get<Mat>(u.slots[0]) * kk;
    const Mat xi_v = kk.adjoint() * std::get<Mat>(v.slots[0]) * kk;
    const double rhs =
        class_form_chart(g, g.alcove_embed(su2_tau(0.17)), xi_u, xi_v);
    CHECK(std::abs(lhs - rhs) < 1e-10);
    CHECK(std::abs(eval_form(*cls, q, u, u)) < 1e-14);
    CHECK(std::abs(lhs + eval_form(*cls, q, v, u)) < 1e-13);
  }
}

TEST_CASE("double and fused double moments") {
  SuGroup g(2);
  const auto dd = double_space(&g);
  Rng rng(4);
  const Point p = sample_point(*dd, rng);
  const Mat a = std::get<Mat>(p.slots[0]);
  const Mat b = std::get<Mat>(p.slots[1]);
  const auto mu = moment_of(*dd, p);
  CHECK((mu[0] - a * b).norm() < 1e-14);
  CHECK((mu[1] - a.adjoint() * b.adjoint()).norm() < 1e-14);

  const auto ifd = fused_double(&g);
  Point pe;
  pe.slots = {g.identity(), g.identity()};
  CHECK((moment_of(*ifd, pe)[0] - g.identity()).norm() == 0.0);

  // Both tangents in the a slot only: every Omega_D term mixes slots.
  Tangent u = zero_tangent(*dd);
  Tangent v = zero_tangent(*dd);
  u.slots[0] = g.random_algebra(rng);
  v.slots[0] = g.random_algebra(rng);
  CHECK(std::abs(eval_form(*dd, p, u, v)) < 1e-14);

  // Mixed slots expansion.
  Tangent w = zero_tangent(*dd);
  w.slots[1] = g.random_algebra(rng);
  const Mat ea = std::get<Mat>(u.slots[0]);
  const Mat eb = std::get<Mat>(w.slots[1]);
  const double expect =
      0.5 * g.pairing(a.adjoint() * ea * a, eb) +
      0.5 * g.pairing(ea, b.adjoint() * eb * b);
  CHECK(std::abs(eval_form(*dd, p, u, w) - expect) < 1e-13);
}

TEST_CASE("action group law, equivariance and pushforward invariance") {
  SuGroup g(2);
  Rng rng(6);
  for (const SpacePtr& s :
       {conjugacy_class(&g, su2_tau(0.21)), double_space(&g), fused_double(&g),
        invert(fused_double(&g))}) {
    const Point p = sample_point(*s, rng);
    std::vector<Mat> g1(s->num_factors()), g2(s->num_factors()),
        g12(s->num_factors());
    for (int i = 0; i < s->num_factors(); ++i) {
      g1[i] = g.random_group(rng);
      g2[i] = g.random_group(rng);
      g12[i] = g1[i] * g2[i];
    }
    const Point lhs = act_on(*s, g1, act_on(*s, g2, p));
    const Point rhs = act_on(*s, g12, p);
    for (int i = 0; i < s->num_slots(); ++i)
      CHECK((std::get<Mat>(lhs.slots[i]) - std::get<Mat>(rhs.slots[i])).norm() <
            1e-12);

    // Identity acts trivially.
    std::vector<Mat> e(s->num_factors(), g.identity());
    const Point same = act_on(*s, e, p);
    for (int i = 0; i < s->num_slots(); ++i)
      CHECK((std::get<Mat>(same.slots[i]) - std::get<Mat>(p.slots[i])).norm() <
            1e-14);

    // Form invariance under the action with pushed tangents.
    const Tangent u = random_tangent(*s, rng);
    const Tangent v = random_tangent(*s, rng);
    const Point q = act_on(*s, g1, p);
    const Tangent pu = push_tangent(*s, g1, p, u);
    const Tangent pv = push_tangent(*s, g1, p, v);
    CHECK(std::abs(eval_form(*s, q, pu, pv) - eval_form(*s, p, u, v)) < 1e-10);
  }
}

TEST_CASE("infinitesimal action against finite differences") {
  SuGroup g(2);
  Rng rng(8);
  const double h = 1e-5;
  for (const SpacePtr& s :
       {conjugacy_class(&g, su2_tau(0.13)), double_space(&g), fused_double(&g)}) {
    const Point p = sample_point(*s, rng);
    std::vector<Mat> zeta(s->num_factors());
    for (int i = 0; i < s->num_factors(); ++i) zeta[i] = g.random_algebra(rng);
    const Tangent zm = infinitesimal_action(*s, zeta, p);

    std::vector<Mat> gp(s->num_factors()), gm(s->num_factors());
    for (int i = 0; i < s->num_factors(); ++i) {
      gp[i] = g.group_exp(h * zeta[i]);
      gm[i] = g.group_exp(-h * zeta[i]);
    }
    const Point pp = act_on(*s, gp, p);
    const Point pm = act_on(*s, gm, p);
    for (int i = 0; i < s->num_slots(); ++i) {
      // Right-translation coordinate of the finite motion.
      const Mat base = std::get<Mat>(p.slots[i]);
      const Mat diff =
          (std::get<Mat>(pp.slots[i]) - std::get<Mat>(pm.slots[i])) / (2 * h);
      const Mat eta_fd = diff * base.adjoint();
      CHECK((eta_fd - std::get<Mat>(zm.slots[i])).norm() < 1e-7);
    }
  }

  // Zero generator gives the zero tangent.
  const auto cls = conjugacy_class(&g, su2_tau(0.13));
  const Point p = sample_point(*cls, rng);
  const Tangent z =
      infinitesimal_action(*cls, {Mat::Zero(2, 2).eval()}, p);
  CHECK(std::get<Mat>(z.slots[0]).norm() == 0.0);

  // Class moment pullback of the fundamental field: theta_bar = xi - Ad_f xi.
  const Mat xi = g.random_algebra(rng);
  const Tangent vxi = infinitesimal_action(*cls, {xi}, p);
  const Prepared pr = cls->prepare(p, 0, vxi);
  const Mat f = moment_of(*cls, p)[0];
  CHECK((pr.theta_bar[0] - (xi - f * xi * f.adjoint())).norm() < 1e-13);
}

TEST_CASE("exterior derivative is alternating and matches the cubic term") {
  SuGroup g3(3);
  const auto cls = conjugacy_class(&g3, su3_tau(0.22, 0.04));
  Rng rng(10);
  const Point p = sample_point(*cls, rng);
  const Tangent u = random_tangent(*cls, rng);
  const Tangent v = random_tangent(*cls, rng);
  const Tangent w = random_tangent(*cls, rng);

  CHECK(std::abs(exterior_derivative3(*cls, p, u, u, w)) < 1e-10);
  CHECK(std::abs(exterior_derivative3(*cls, p, u, v, v)) < 1e-10);

  // (qh2) for a six-dimensional class: the cubic term does not vanish and
  // must cancel dOmega.
  const double d = exterior_derivative3(*cls, p, u, v, w);
  const Prepared pu = cls->prepare(p, 0, u);
  const Prepared pv = cls->prepare(p, 0, v);
  const Prepared pw = cls->prepare(p, 0, w);
  const double cubic = cubic_term(*cls, pu, pv, pw);
  CHECK(std::abs(cubic) > 1e-3);  // non-degenerate test data
  CHECK(std::abs(d + cubic) < 1e-7);
}

TEST_CASE("axiom suite passes on the finite catalog") {
  SuGroup g2(2);
  SuGroup g3(3);
  const AxiomTolerances tol;
  for (const SpacePtr& s : {
           conjugacy_class(&g2, su2_tau(0.11)),
           conjugacy_class(&g2, su2_tau(0.19)),
           conjugacy_class(&g3, su3_tau(0.21, 0.05)),
           double_space(&g2),
           fused_double(&g2),
           invert(conjugacy_class(&g2, su2_tau(0.23))),
           invert(double_space(&g2)),
           invert(fused_double(&g2)),
       }) {
    const AxiomReport rep = check_axioms(*s, 12, 99, tol);
    INFO(s->name(), " qh1=", rep.equivariance.max_residual,
         " qh2=", rep.d_omega.max_residual,
         " qh3=", rep.moment_pairing.max_residual,
         " qh4=", rep.kernel.max_residual);
    CHECK(rep.pass());
  }
}

TEST_CASE("kernel axiom at special monodromy") {
  // The class at lambda = (1/4, -1/4) has Ad_f with eigenvalue -1 twice; its
  // form vanishes identically and the predicted kernel fills the class
  // tangent space.
  SuGroup g(2);
  const auto cls = conjugacy_class(&g, su2_tau(0.25));
  const AxiomReport rep = check_axioms(*cls, 6, 5);
  CHECK(rep.kernel.pass);

  Rng rng(3);
  const Point p = sample_point(*cls, rng);
  const Mat f = moment_of(*cls, p)[0];
  const Eigen::MatrixXd ad1 =
      g.adjoint_matrix(f) + Eigen::MatrixXd::Identity(3, 3);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad1);
  int dim_m1 = 0;
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()[i] < 1e-10) ++dim_m1;
  CHECK(dim_m1 == 2);
}

TEST_CASE("inversion is an involution") {
  SuGroup g(2);
  const auto m = fused_double(&g);
  const auto mm = invert(invert(m));
  Rng rng(12);
  const Point p = sample_point(*m, rng);
  const Tangent u = random_tangent(*m, rng);
  const Tangent v = random_tangent(*m, rng);
  CHECK(std::abs(eval_form(*m, p, u, v) - eval_form(*mm, p, u, v)) < 1e-14);
  CHECK((moment_of(*m, p)[0] - moment_of(*mm, p)[0]).norm() < 1e-14);

  const auto mi = invert(m);
  CHECK((moment_of(*mi, p)[0] - moment_of(*m, p)[0].adjoint()).norm() < 1e-14);
  CHECK(std::abs(eval_form(*mi, p, u, v) + eval_form(*m, p, u, v)) < 1e-14);
}

TEST_CASE("fusion moment, cross term and axiom preservation") {
  SuGroup g(2);
  Rng rng(21);
  const auto c1 = conjugacy_class(&g, su2_tau(0.12));
  const auto c2 = conjugacy_class(&g, su2_tau(0.27));
  const auto f12 = fuse(c1, c2);

  const Point p = sample_point(*f12, rng);
  Point p1, p2;
  p1.slots = {p.slots[0]};
  p2.slots = {p.slots[1]};
  CHECK((moment_of(*f12, p)[0] -
         moment_of(*c1, p1)[0] * moment_of(*c2, p2)[0])
            .norm() < 1e-13);

  // Tangents supported on the first factor only: the cross term vanishes
  // because mu_2^* theta_bar does.
  Tangent u = zero_tangent(*f12);
  Tangent v = zero_tangent(*f12);
  u.slots[0] = g.random_algebra(rng);
  v.slots[0] = g.random_algebra(rng);
  Tangent u1 = zero_tangent(*c1);
  Tangent v1 = zero_tangent(*c1);
  u1.slots[0] = u.slots[0];
  v1.slots[0] = v.slots[0];
  CHECK(std::abs(eval_form(*f12, p, u, v) - eval_form(*c1, p1, u1, v1)) <
        1e-13);

  const AxiomReport rep = check_axioms(*f12, 12, 31);
  CHECK(rep.pass());

  // A mixed three-factor fusion also passes.
  const auto big = fuse_many({c1, invert(fused_double(&g)), c2});
  CHECK(check_axioms(*big, 6, 77).pass());
}

TEST_CASE("fusion associativity is exact") {
  SuGroup g(2);
  const auto m1 = conjugacy_class(&g, su2_tau(0.1));
  const auto m2 = conjugacy_class(&g, su2_tau(0.2));
  const auto m3 = fused_double(&g);
  const auto left = fuse(fuse(m1, m2), m3);
  const auto right = fuse(m1, fuse(m2, m3));
  Rng rng(14);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Point p = sample_point(*left, rng);
    const Tangent u = random_tangent(*left, rng);
    const Tangent v = random_tangent(*left, rng);
    worst = std::max(
        worst, std::abs(eval_form(*left, p, u, v) - eval_form(*right, p, u, v)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("single-factor recipe returns the space itself") {
  SuGroup g(2);
  const auto m = fused_double(&g);
  CHECK(fuse_many({m}).get() == m.get());
}

TEST_CASE("constraint sampling and infeasibility") {
  SuGroup g(2);
  Rng rng(40);

  // C * C^- with matching labels is solvable: the inverse class absorbs the
  // first moment.
  Recipe r;
  r.factors = {conjugacy_class(&g, su2_tau(0.2)),
               invert(conjugacy_class(&g, su2_tau(0.2)))};
  const auto fused = build_recipe_space(r);
  const ConstraintSample s = sample_constraint(*fused, r, rng);
  CHECK(s.moment_defect < 1e-12);
  CHECK(s.basis_residual < 1e-10);

  // Restricted form is antisymmetric on surface tangents.
  if (s.basis.cols() >= 2) {
    const Tangent u = surface_tangent(*fused, s, Vec::Unit(s.basis.cols(), 0));
    const Tangent v = surface_tangent(*fused, s, Vec::Unit(s.basis.cols(), 1));
    CHECK(std::abs(restricted_form(*fused, s, u, v) +
                   restricted_form(*fused, s, v, u)) < 1e-13);
    // A non-tangent direction is rejected.
    Tangent bad = random_tangent(*fused, rng);
    bool ok = true;
    try {
      restricted_form(*fused, s, bad, v);
    } catch (const Error& e) {
      ok = false;
      CHECK(e.code() == ErrorCode::kNotTangent);
    }
    CHECK(!ok);
  }

  // A class cannot absorb a target outside its eigenphase set.
  Recipe infeasible;
  infeasible.factors = {conjugacy_class(&g, su2_tau(0.11)),
                        conjugacy_class(&g, su2_tau(0.35))};
  infeasible.solve_index = 1;
  const auto fi = build_recipe_space(infeasible);
  CHECK_THROWS_AS(sample_constraint(*fi, infeasible, rng), Error);
}

TEST_CASE("unit-level reduction of the internally fused double") {
  SuGroup g(2);
  Rng rng(50);

  // Genus one: commuting pairs.  The unit value e is not a regular value
  // here: the sampled stabilizer is one-dimensional, the raw restricted
  // rank is 2 and the free-stratum (generic) rank is 0.
  Recipe genus1;
  genus1.factors = {fused_double(&g)};
  genus1.solve_index = 0;
  const auto m1 = build_recipe_space(genus1);
  const ConstraintSample s1 = sample_constraint(*m1, genus1, rng);
  CHECK(s1.moment_defect < 1e-12);
  const GaugeReport r1 = gauge_degeneracy_check(*m1, s1);
  CHECK(r1.surface_dim == 4);
  CHECK(r1.orbit_dim == 2);
  CHECK(r1.stabilizer_dim == 1);
  CHECK(r1.form_rank == 2);
  CHECK(r1.reduced_rank == 0);
  CHECK(r1.gauge_tangency < 1e-12);
  CHECK(r1.gauge_pairing < 1e-9);
  CHECK(r1.kernel_gauge_angle < 1e-6);

  // Genus two: free generic stratum, rank 6.
  Recipe genus2;
  genus2.factors = {fused_double(&g), fused_double(&g)};
  genus2.solve_index = 1;
  const auto m2 = build_recipe_space(genus2);
  const ConstraintSample s2 = sample_constraint(*m2, genus2, rng);
  CHECK(s2.moment_defect < 1e-11);
  const GaugeReport r2 = gauge_degeneracy_check(*m2, s2);
  CHECK(r2.surface_dim == 9);
  CHECK(r2.orbit_dim == 3);
  CHECK(r2.stabilizer_dim == 0);
  CHECK(r2.form_rank == 6);
  CHECK(r2.reduced_rank == 6);
  CHECK(r2.gauge_pairing < 1e-9);
  CHECK(r2.kernel_gauge_angle < 1e-6);
}
