#pragma once

#include <vector>

#include "qham_space.hpp"

namespace qham {

// ---------------------------------------------------------------------------
// Chart primitives.  A LoopPoint is the chart l(sigma) = h(sigma) E(sigma)
// g0^-1 with E(sigma) = exp(i sigma diag(lambda)); quasi-periodicity and the
// monodromy are exact in this chart, the моment map is
// mu = g0 exp(-2 pi i diag(lambda)) g0^-1.
// ---------------------------------------------------------------------------

/// exp(i sigma diag(lambda)).
Mat chart_phase(const Vec& lambda, double sigma);

/// l(sigma_j) for any integer node index (ghost nodes use the true sigma and
/// the periodic extension of h).
Mat loop_value(const LoopPoint& lp, int j);

Mat loop_monodromy(const LoopPoint& lp);

/// mu(l) = l(2 pi)^-1 l(0), evaluated through the chart.
Mat loop_moment(const SuGroup& g, const LoopPoint& lp);

/// mu(l) from the node values themselves; agrees with loop_moment to
/// roundoff and is kept as an independent route for tests.
Mat loop_moment_direct(const LoopPoint& lp);

/// dl l^-1 and l^-1 dl at node j for a chart tangent.
Mat loop_rho(const SuGroup& g, const LoopPoint& lp, const LoopTangent& t, int j);
Mat loop_xi(const SuGroup& g, const LoopPoint& lp, const LoopTangent& t, int j);

/// Exact Maurer-Cartan pullback mu^* theta of a chart tangent.
Mat loop_theta(const SuGroup& g, const LoopPoint& lp, const LoopTangent& t);

/// Smooth random loop: h from a low-frequency Fourier field, lambda in the
/// open alcove, g0 Haar.
LoopPoint random_loop(const SuGroup& g, int grid, Rng& rng);

// ---------------------------------------------------------------------------
// 2-form, Hamiltonian, moment density
// ---------------------------------------------------------------------------

/// Quadrature rule for the sigma integrals; weights carry the measure.
struct LoopQuad {
  std::vector<double> sigma;
  std::vector<double> weight;
};

/// Trapezoid rule over the N+1 chart nodes (second order).
LoopQuad trapezoid_rule(int grid);

/// Composite Gauss-Legendre rule; together with trigonometric interpolation
/// of the node data this evaluates the loop integrals to machine precision
/// on band-limited data.
LoopQuad gauss_rule(int panels = 8, int points = 20);

/// Tangent data cached at the quadrature nodes of `quad`.
PreparedLoop prepare_loop(const SuGroup& g, const LoopPoint& lp,
                          const LoopTangent& t, const LoopQuad& quad,
                          bool spectral);

/// Omega(l)(u, v) = 1/2 int (l^-1 dl, d_sigma(l^-1 dl)) dsigma
///                + 1/2 (dl l^-1|_0, dl l^-1|_2pi), antisymmetrized.
double omega_loop(const SuGroup& g, const LoopQuad& quad,
                  const PreparedLoop& u, const PreparedLoop& v);

/// H(l) = -1/2 int (d_sigma l l^-1, d_sigma l l^-1) dsigma.  The spectral
/// flavor differentiates and integrates on the interpolation path.
double loop_hamiltonian(const SuGroup& g, const LoopPoint& lp,
                        bool spectral = false);

/// Exact differential of H along a chart tangent.
double loop_hamiltonian_gradient(const SuGroup& g, const LoopPoint& lp,
                                 const LoopTangent& t, bool spectral = false);

/// Phi = -d_sigma l l^-1 at the grid nodes.
std::vector<Mat> chiral_moment_density(const SuGroup& g, const LoopPoint& lp);

/// Chart expansion of Omega(l) in (h, tau, g0) coordinates, evaluated on the
/// spectral path.  Independent transcription used as an oracle.
double omega_chart_expansion(const SuGroup& g, const LoopPoint& lp,
                             const LoopTangent& u, const LoopTangent& v);

// ---------------------------------------------------------------------------
// Loop reversal
// ---------------------------------------------------------------------------

/// Chart representation of sigma -> l(2 pi - sigma).  Exact: the reversed
/// alcove parameter is the order-reversed negation and g0 picks up a fixed
/// signed permutation, so no eigendecomposition is involved.
LoopPoint loop_reverse(const SuGroup& g, const LoopPoint& lp);

/// Exact pushforward of a chart tangent under loop_reverse.
LoopTangent loop_reverse_push(const SuGroup& g, const LoopPoint& lp,
                              const LoopPoint& rev, const LoopTangent& t);

// ---------------------------------------------------------------------------
// Holonomy and the WZNW field factorization
// ---------------------------------------------------------------------------

/// Solves w^-1 d_sigma w = A, w(0) = e by midpoint product integration.
/// A has one node value per grid point (periodic); returns nodes 0..N.
std::vector<Mat> holonomy(const SuGroup& g, const std::vector<Mat>& density);

/// Solves d_sigma w w^-1 = A, w(0) = e.
std::vector<Mat> holonomy_left(const SuGroup& g, const std::vector<Mat>& density);

struct Factorization {
  LoopPoint l;          // left mover, l = g_L g(0)
  LoopPoint g_r;        // right holonomy as a quasi-periodic map
  std::vector<Mat> j_right;
  double b_constancy;   // max_j |b_j - b_0|, should be O(dsigma^2)
  double moment_match;  // |mu(l) - g_R(2 pi)|, should be O(dsigma^2)
};

/// Splits a WZNW configuration (J_L, g) into the left mover l and the right
/// holonomy g_R; checks that b(sigma) = g_L^-1 g g_R^-1 is sigma-constant.
Factorization factorize_wznw(const SuGroup& g, const std::vector<Mat>& j_left,
                             const std::vector<Mat>& g_field);

/// H_WZ = -1/2 int (J_L, J_L) - 1/2 int (J_R, J_R).
double wznw_hamiltonian(const SuGroup& g, const std::vector<Mat>& j_left,
                        const std::vector<Mat>& j_right);

// ---------------------------------------------------------------------------
// W as a quasi-Hamiltonian space
// ---------------------------------------------------------------------------

/// The discretized chiral WZNW space: one loop slot, G acting by
/// l -> l h^-1 (g0 -> h g0 in the chart), moment the inverse monodromy.
/// With `spectral` set the 2-form is evaluated on the Gauss-Legendre /
/// trigonometric-interpolation path (machine precision on smooth data)
/// instead of trapezoid + central differences.
class WznwSpace : public Space {
 public:
  WznwSpace(const SuGroup* g, int grid, bool spectral = false);

  int grid() const { return grid_; }
  bool spectral() const { return spectral_; }
  const LoopQuad& quad() const { return quad_; }

  void sample(Rng& rng, Point& p, int slot0) const override;
  void moment(const Point& p, int slot0, Mat* out) const override;
  void act(const Mat* g, const Point& p, int slot0, Point& out) const override;
  void push(const Mat* g, const Point& p, int slot0, const Tangent& t,
            Tangent& out) const override;
  void inf_action(const Mat* zeta, const Point& p, int slot0,
                  Tangent& out) const override;
  Prepared prepare(const Point& p, int slot0, const Tangent& t) const override;
  double form(const Point& p, int slot0, const Prepared& u,
              const Prepared& v) const override;
  void chart_nulls(const Point& p, int slot0, const Tangent& zero,
                   std::vector<Tangent>& out) const override;
  bool can_solve_moment() const override { return true; }
  void solve_moment(const Mat& target, Rng& rng, Point& p,
                    int slot0) const override;

 private:
  int grid_;
  bool spectral_;
  LoopQuad quad_;
};

SpacePtr make_wznw(const SuGroup* g, int grid, bool spectral = false);

struct EvolutionResult {
  LoopTangent field;
  double form_residual;    // |iota(v) Omega - dH| over the chart basis
  double moment_residual;  // |iota(v) mu^* theta|
  bool conditioning_warning;
};

/// Least-squares solve of iota(v)Omega = dH, iota(v)mu^*theta = 0 over the
/// chart tangent basis.  Warns when Ad_mu + Id is near singular.
EvolutionResult evolution_field(const WznwSpace& w, const LoopPoint& lp);

// ---------------------------------------------------------------------------
// Serialization (fixture reuse)
// ---------------------------------------------------------------------------

std::string loop_to_json(const LoopPoint& lp);
LoopPoint loop_from_json(const std::string& text);

}  // namespace qham
