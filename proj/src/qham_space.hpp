#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "su_group.hpp"

namespace qham {

// ---------------------------------------------------------------------------
// Points and tangents
// ---------------------------------------------------------------------------

/// Discretized quasi-periodic map in the chart l(sigma) = h(sigma)
/// exp(i sigma diag(lambda)) g0^-1 on a uniform sigma grid.  h is strictly
/// periodic (h[N] == h[0] implicitly), the monodromy is
/// g0 exp(2 pi i diag(lambda)) g0^-1 by construction.
struct LoopPoint {
  std::vector<Mat> h;
  Vec lambda;
  Mat g0;

  int nodes() const { return static_cast<int>(h.size()); }
};

/// Chart tangent of a LoopPoint: right-translation coordinates on the h
/// nodes and on g0, plus a sum-zero eigenphase direction.
struct LoopTangent {
  std::vector<Mat> eta;
  Vec dlambda;
  Mat zeta0;
};

using SlotValue = std::variant<Mat, LoopPoint>;
using SlotTangent = std::variant<Mat, LoopTangent>;

struct Point {
  std::vector<SlotValue> slots;
};

/// Right-translation coordinates per slot: a group slot moves along
/// s -> exp(s eta) g, a loop slot moves along its chart coordinates.
struct Tangent {
  std::vector<SlotTangent> slots;
};

enum class SlotKind { kGroup, kLoop };

struct SlotDesc {
  SlotKind kind = SlotKind::kGroup;
  int grid = 0;  // nodes, loop slots only
};

// ---------------------------------------------------------------------------
// Prepared tangents
// ---------------------------------------------------------------------------

/// Per-tangent data cached ahead of pairwise form evaluations: the
/// Maurer-Cartan pullbacks of every moment component and the loop-slot node
/// arrays.  Grams over large tangent bases stay O(D^2) cheap this way.
struct PreparedLoop {
  std::vector<Mat> xi;   // l^-1 dl at nodes 0..N
  std::vector<Mat> dxi;  // d/dsigma of the above, central differences
  Mat rho0, rho2pi;      // dl l^-1 at sigma = 0 and 2 pi
};

struct Prepared {
  std::vector<Mat> theta;      // mu^-1 dmu per structure factor
  std::vector<Mat> theta_bar;  // dmu mu^-1 per structure factor
  std::vector<Mat> eta;        // right coordinate per group slot (this space)
  std::vector<PreparedLoop> loop;  // per loop slot (this space)
  std::vector<Prepared> children;  // fusion factors
};

// ---------------------------------------------------------------------------
// Space interface
// ---------------------------------------------------------------------------

/// A quasi-Hamiltonian space descriptor: slot signature, structure-group
/// factors with action and moment component each, and the invariant 2-form.
/// All member functions thread a slot offset so that fusion products can
/// evaluate their factors inside the composite point layout.  Instances are
/// immutable after construction and safe to share across threads.
class Space {
 public:
  virtual ~Space() = default;

  const std::string& name() const { return name_; }
  const SuGroup& group() const { return *group_; }
  const std::vector<SlotDesc>& slots() const { return slots_; }
  int num_slots() const { return static_cast<int>(slots_.size()); }
  int num_factors() const { return n_factors_; }

  virtual void sample(Rng& rng, Point& p, int slot0) const = 0;

  /// One group element per structure factor, written to out[0..factors).
  virtual void moment(const Point& p, int slot0, Mat* out) const = 0;

  /// Group action; g has one entry per structure factor.
  virtual void act(const Mat* g, const Point& p, int slot0, Point& out) const = 0;

  /// Pushforward of a tangent under act(g, .), exact in right coordinates.
  virtual void push(const Mat* g, const Point& p, int slot0, const Tangent& t,
                    Tangent& out) const = 0;

  /// Fundamental vector field of (zeta_1, ..., zeta_k) at p.
  virtual void inf_action(const Mat* zeta, const Point& p, int slot0,
                          Tangent& out) const = 0;

  virtual Prepared prepare(const Point& p, int slot0, const Tangent& t) const = 0;

  virtual double form(const Point& p, int slot0, const Prepared& u,
                      const Prepared& v) const = 0;

  /// Basis of tangents that move the chart but not the underlying point
  /// (centralizer directions of overcomplete charts).  Appended into `out`
  /// as copies of `zero` with this space's slots filled in.
  virtual void chart_nulls(const Point& p, int slot0, const Tangent& zero,
                           std::vector<Tangent>& out) const {}

  /// True if moment(p) = target is solvable for a point of this space.
  virtual bool can_solve_moment() const { return false; }

  /// Writes a point with single-factor moment exactly equal to target.
  /// Throws ErrorCode::kInfeasible when the target is out of reach.
  virtual void solve_moment(const Mat& target, Rng& rng, Point& p,
                            int slot0) const;

 protected:
  Space(std::string name, const SuGroup* group, std::vector<SlotDesc> slots,
        int n_factors)
      : name_(std::move(name)),
        group_(group),
        slots_(std::move(slots)),
        n_factors_(n_factors) {}

  std::string name_;
  const SuGroup* group_;
  std::vector<SlotDesc> slots_;
  int n_factors_;
};

using SpacePtr = std::shared_ptr<const Space>;

// ---------------------------------------------------------------------------
// Convenience wrappers (slot0 = 0, whole-space layout)
// ---------------------------------------------------------------------------

Point sample_point(const Space& s, Rng& rng);
std::vector<Mat> moment_of(const Space& s, const Point& p);
Point act_on(const Space& s, const std::vector<Mat>& g, const Point& p);
Tangent push_tangent(const Space& s, const std::vector<Mat>& g, const Point& p,
                     const Tangent& t);
Tangent infinitesimal_action(const Space& s, const std::vector<Mat>& zeta,
                             const Point& p);
double eval_form(const Space& s, const Point& p, const Tangent& u,
                 const Tangent& v);

// ---------------------------------------------------------------------------
// Tangent coordinates, flows, brackets
// ---------------------------------------------------------------------------

/// Total chart dimension of the tangent space.
int tangent_dim(const Space& s);

Tangent zero_tangent(const Space& s);
Vec tangent_to_coords(const Space& s, const Tangent& t);
Tangent tangent_from_coords(const Space& s, const Vec& c);

/// Gaussian tangent; loop slots get smooth low-frequency node data so that
/// discretization error stays second order.
Tangent random_tangent(const Space& s, Rng& rng);

/// Constant-coordinate flow by time s: group slots g -> exp(s eta) g, loop
/// slots move h nodes, lambda and g0 the same way.
Point flow(const Space& s, const Point& p, const Tangent& t, double time);

/// Slot-wise algebra bracket of the coordinates ([eta_u, eta_v] per group
/// slot and per loop node; eigenphase directions commute).
Tangent coordinate_bracket(const Space& s, const Tangent& u, const Tangent& v);

/// Linear combination a*u + b*v.
Tangent tangent_combo(const Space& s, double a, const Tangent& u, double b,
                      const Tangent& v);

/// Basis vector of the sum-zero eigenphase subspace, m = 0..n-2.
Vec alcove_direction_basis(int n, int m);

}  // namespace qham
