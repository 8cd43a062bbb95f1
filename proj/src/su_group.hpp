#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace qham {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using cd = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kTwoPi = 2.0 * kPi;

/// Eigenphase label of a conjugacy class, in units of full turns (fractions
/// of 2pi).  Valid parameters are sorted descending, sum to zero and have
/// spread at most one turn, which makes them a fundamental domain for
/// conjugation.
struct AlcoveParameter {
  Vec lambda;

  int size() const { return static_cast<int>(lambda.size()); }
  bool valid(double tol = 1e-9) const;
  /// Distance from the walls of the open alcove (0 on the boundary).
  double interior_margin() const;
};

/// Numerics for SU(n): elements, algebra, exponential/logarithm, adjoint
/// action, the invariant pairing and the eigenphase (alcove) parametrization.
///
/// The pairing is fixed to pairing_scale * (-Re tr(x y)); the algebra basis
/// is orthonormal for the scale-1 form, so the Gram matrix is
/// pairing_scale * Id.
class SuGroup {
 public:
  explicit SuGroup(int n, double pairing_scale = 1.0);

  int n() const { return n_; }
  int dim() const { return dim_; }
  double pairing_scale() const { return scale_; }
  const std::vector<Mat>& basis() const { return basis_; }

  Mat identity() const { return Mat::Identity(n_, n_); }

  // -- invariant pairing ----------------------------------------------------

  /// pairing_scale * (-Re tr(x y)); symmetric, Ad-invariant, positive
  /// definite on the algebra.
  double pairing(const Mat& x, const Mat& y) const;

  /// Complex-bilinear extension -pairing_scale * tr(x y).  Needed for chart
  /// expressions that pair algebra elements against real diagonal matrices.
  cd cpairing(const Mat& x, const Mat& y) const;

  static Mat bracket(const Mat& x, const Mat& y) { return x * y - y * x; }

  // -- exponential / logarithm ----------------------------------------------

  /// Matrix exponential of an anti-Hermitian argument, via the unitary
  /// eigendecomposition of -i x.  Exactly unitary up to roundoff.
  Mat group_exp(const Mat& x) const;

  /// Principal logarithm of a special unitary matrix, with the eigenphase
  /// sum folded back to zero so the result is traceless.  Fails if an
  /// eigenvalue sits within angle 1e-6 of the branch cut at -1.
  Mat group_log(const Mat& g) const;

  // -- adjoint action ---------------------------------------------------------

  Mat adjoint(const Mat& g, const Mat& x) const { return g * x * g.adjoint(); }

  /// Matrix of Ad_g in basis coordinates (orthogonal w.r.t. the Gram).
  Eigen::MatrixXd adjoint_matrix(const Mat& g) const;

  // -- alcove parametrization -------------------------------------------------

  /// exp(2 pi i diag(lambda)).
  Mat alcove_embed(const AlcoveParameter& tau) const;

  /// g = k * alcove_embed(tau) * k^-1 with tau in the alcove and k special
  /// unitary.  Eigenphases are sorted descending; ties keep a deterministic
  /// order, at the price of k being non-unique on degenerate classes.
  std::pair<AlcoveParameter, Mat> alcove_decompose(const Mat& g) const;

  // -- sampling ---------------------------------------------------------------

  /// Haar-distributed special unitary matrix (QR of a complex Ginibre
  /// matrix, phases fixed, determinant root absorbed).
  Mat random_group(Rng& rng) const;

  /// Standard gaussian in basis coordinates.
  Mat random_algebra(Rng& rng) const;

  /// Interior alcove parameter with eigenphase spread in [0.15, 0.45].
  AlcoveParameter random_alcove(Rng& rng) const;

  // -- coordinates ------------------------------------------------------------

  Vec algebra_coords(const Mat& x) const;
  Mat algebra_from_coords(const Vec& c) const;

  // -- validation -------------------------------------------------------------

  static double unitary_defect(const Mat& m);
  bool is_group_element(const Mat& m, double tol = 1e-12) const;
  bool is_algebra_element(const Mat& x, double tol = 1e-12) const;
  void require_group(const Mat& m, const char* where) const;

 private:
  int n_;
  int dim_;
  double scale_;
  std::vector<Mat> basis_;
};

}  // namespace qham
