#include "fusion.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "axiom_check.hpp"
#include "catalog.hpp"
#include "errors.hpp"

namespace qham {

SpacePtr build_recipe_space(const Recipe& recipe) {
  return fuse_many(recipe.factors);
}

int recipe_slot_offset(const Recipe& recipe, int k) {
  int at = 0;
  for (int i = 0; i < k; ++i) at += recipe.factors[i]->num_slots();
  return at;
}

ConstraintSample sample_constraint(const Space& fused, const Recipe& recipe,
                                   Rng& rng) {
  const int nfac = static_cast<int>(recipe.factors.size());
  int solve = recipe.solve_index;
  if (solve < 0) {
    for (int k = nfac - 1; k >= 0; --k)
      if (recipe.factors[k]->can_solve_moment()) {
        solve = k;
        break;
      }
  }
  if (solve < 0 || !recipe.factors[solve]->can_solve_moment())
    fail(ErrorCode::kInfeasible, "sample_constraint: no solvable factor");

  ConstraintSample out;
  out.point.slots.resize(fused.num_slots());
  for (int k = 0; k < nfac; ++k) {
    if (k == solve) continue;
    recipe.factors[k]->sample(rng, out.point, recipe_slot_offset(recipe, k));
  }
  // Designated moments left and right of the solved factor.
  const SuGroup& g = fused.group();
  Mat left = g.identity();
  Mat right = g.identity();
  for (int k = 0; k < nfac; ++k) {
    if (k == solve) continue;
    std::vector<Mat> m(recipe.factors[k]->num_factors());
    recipe.factors[k]->moment(out.point, recipe_slot_offset(recipe, k), m.data());
    if (k < solve)
      left = left * m[0];
    else
      right = right * m[0];
  }
  const Mat target = left.adjoint() * right.adjoint();
  recipe.factors[solve]->solve_moment(target, rng, out.point,
                                      recipe_slot_offset(recipe, solve));

  std::vector<Mat> mu(fused.num_factors());
  fused.moment(out.point, 0, mu.data());
  out.moment_defect = (mu[0] - g.identity()).norm();

  // Exact moment differential over the chart basis; its nullspace is the
  // constraint tangent space.
  const int dim_t = tangent_dim(fused);
  Eigen::MatrixXd dmu(g.dim(), dim_t);
  for (int i = 0; i < dim_t; ++i) {
    Vec e = Vec::Zero(dim_t);
    e[i] = 1.0;
    const Tangent t = tangent_from_coords(fused, e);
    dmu.col(i) = g.algebra_coords(fused.prepare(out.point, 0, t).theta[0]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dmu, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-9 * std::max(sv[0], 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  out.basis = svd.matrixV().rightCols(dim_t - rank);
  for (int c = 0; c < out.basis.cols(); ++c)
    out.basis_residual =
        std::max(out.basis_residual, (dmu * out.basis.col(c)).norm());
  return out;
}

Tangent surface_tangent(const Space& fused, const ConstraintSample& sample,
                        const Vec& coeff) {
  if (coeff.size() != sample.basis.cols())
    fail(ErrorCode::kDimensionMismatch, "surface_tangent: coefficient size");
  return tangent_from_coords(fused, sample.basis * coeff);
}

double restricted_form(const Space& fused, const ConstraintSample& sample,
                       const Tangent& u, const Tangent& v) {
  const SuGroup& g = fused.group();
  const Prepared pu = fused.prepare(sample.point, 0, u);
  const Prepared pv = fused.prepare(sample.point, 0, v);
  const double scale_u = std::max(1.0, tangent_to_coords(fused, u).norm());
  const double scale_v = std::max(1.0, tangent_to_coords(fused, v).norm());
  if (g.algebra_coords(pu.theta[0]).norm() > 1e-8 * scale_u ||
      g.algebra_coords(pv.theta[0]).norm() > 1e-8 * scale_v)
    fail(ErrorCode::kNotTangent,
         "restricted_form: tangent leaves the constraint surface");
  return fused.form(sample.point, 0, pu, pv);
}

GaugeReport gauge_degeneracy_check(const Space& fused,
                                   const ConstraintSample& sample) {
  const SuGroup& g = fused.group();
  const int dim_g = g.dim();
  const int nf = fused.num_factors();
  const int nb = static_cast<int>(sample.basis.cols());
  GaugeReport rep;
  rep.surface_dim = nb;

  // Gauge directions of the merged (diagonal) factor.
  std::vector<Tangent> gauge(dim_g);
  Eigen::MatrixXd gauge_cols(tangent_dim(fused), dim_g);
  for (int i = 0; i < dim_g; ++i) {
    std::vector<Mat> zeta(nf, Mat::Zero(g.n(), g.n()));
    zeta[0] = g.basis()[i];
    gauge[i] = infinitesimal_action(fused, zeta, sample.point);
    gauge_cols.col(i) = tangent_to_coords(fused, gauge[i]);
    rep.gauge_tangency = std::max(
        rep.gauge_tangency,
        g.algebra_coords(
             fused.prepare(sample.point, 0, gauge[i]).theta[0])
            .norm());
  }
  const Eigen::MatrixXd orbit = orthonormal_span(gauge_cols, 1e-8);
  rep.orbit_dim = static_cast<int>(orbit.cols());
  rep.stabilizer_dim = dim_g - rep.orbit_dim;

  // Restricted Gram over the constraint basis.
  std::vector<Prepared> prep(nb);
  for (int i = 0; i < nb; ++i)
    prep[i] = fused.prepare(sample.point, 0,
                            tangent_from_coords(fused, sample.basis.col(i)));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = i + 1; j < nb; ++j) {
      const double x = fused.form(sample.point, 0, prep[i], prep[j]);
      gram(i, j) = x;
      gram(j, i) = -x;
    }

  for (int i = 0; i < dim_g; ++i) {
    const Prepared pz = fused.prepare(sample.point, 0, gauge[i]);
    for (int j = 0; j < nb; ++j)
      rep.gauge_pairing =
          std::max(rep.gauge_pairing,
                   std::abs(fused.form(sample.point, 0, pz, prep[j])));
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-7 * std::max(sv[0], 1e-30);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  rep.form_rank = rank;
  rep.reduced_rank = rank - 2 * rep.stabilizer_dim;

  // Kernel of the restricted form against the gauge span, both expressed in
  // constraint-basis coordinates.
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(nb - rank);
  const Eigen::MatrixXd gauge_in_basis =
      orthonormal_span(sample.basis.transpose() * gauge_cols, 1e-8);
  rep.kernel_gauge_angle =
      max_principal_angle(orthonormal_span(kernel), gauge_in_basis);
  return rep;
}

}  // namespace qham
