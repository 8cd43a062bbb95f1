#pragma once

#include <cstdint>

#include "qham_space.hpp"

namespace qham {

/// Ordered fusion recipe.  Each factor contributes its designated (first)
/// structure factor to the running diagonal merge; `solve_index` names the
/// factor whose moment absorbs the product of the others so that the total
/// merged moment is exactly the identity.
struct Recipe {
  std::vector<SpacePtr> factors;
  int solve_index = -1;  // -1: last factor that can solve its moment
};

SpacePtr build_recipe_space(const Recipe& recipe);

/// Slot offset of factor k inside the fused point layout.
int recipe_slot_offset(const Recipe& recipe, int k);

struct ConstraintSample {
  Point point;
  double moment_defect = 0.0;   // |mu_total(point) - id|
  Eigen::MatrixXd basis;        // orthonormal ker d(mu_total) in chart coords
  double basis_residual = 0.0;  // max |mu^* theta| over the basis
};

/// Samples the unit level of the merged moment: every factor except the
/// solved one is drawn at random, the solved factor absorbs the product.
/// The tangent basis of the constraint surface is the nullspace of the
/// exact moment differential.  Throws kInfeasible if the solved factor
/// cannot reach its target.
ConstraintSample sample_constraint(const Space& fused, const Recipe& recipe,
                                   Rng& rng);

/// Tangent with the given coefficients in the constraint basis.
Tangent surface_tangent(const Space& fused, const ConstraintSample& sample,
                        const Vec& coeff);

/// Omega evaluated on constraint-surface tangents; rejects tangents whose
/// moment differential does not vanish.
double restricted_form(const Space& fused, const ConstraintSample& sample,
                       const Tangent& u, const Tangent& v);

struct GaugeReport {
  double gauge_tangency = 0.0;      // |d mu_total(zeta_M)| over a zeta basis
  double gauge_pairing = 0.0;       // max |Omega(zeta_M, surface tangent)|
  int surface_dim = 0;
  int orbit_dim = 0;                // rank of zeta -> zeta_M
  int stabilizer_dim = 0;
  int form_rank = 0;                // numerical rank of the restricted form
  int reduced_rank = 0;             // form_rank - 2 * stabilizer_dim
  double kernel_gauge_angle = 0.0;  // kernel of restricted form vs gauge span
};

/// Checks that the diagonal gauge directions are tangent to the surface and
/// span the kernel of the restricted form, and reports the rank data of the
/// symplectic quotient.  On strata with a positive-dimensional stabilizer
/// the raw form rank exceeds the free-stratum dimension formula by twice
/// the stabilizer dimension; reduced_rank removes that excess.
GaugeReport gauge_degeneracy_check(const Space& fused,
                                   const ConstraintSample& sample);

}  // namespace qham
