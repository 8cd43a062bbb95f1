#include "su_group.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace qham {

bool AlcoveParameter::valid(double tol) const {
  const int n = size();
  if (n < 2) return false;
  if (std::abs(lambda.sum()) > tol) return false;
  for (int i = 0; i + 1 < n; ++i) {
    if (lambda[i] < lambda[i + 1] - tol) return false;
  }
  return lambda[0] - lambda[n - 1] <= 1.0 + tol;
}

double AlcoveParameter::interior_margin() const {
  const int n = size();
  double m = 1.0 - (lambda[0] - lambda[n - 1]);
  for (int i = 0; i + 1 < n; ++i) m = std::min(m, lambda[i] - lambda[i + 1]);
  return m;
}

SuGroup::SuGroup(int n, double pairing_scale) : n_(n), scale_(pairing_scale) {
  if (n < 2) fail(ErrorCode::kBadConfig, "SU(n) needs n >= 2");
  if (!(pairing_scale > 0.0))
    fail(ErrorCode::kBadConfig, "pairing scale must be positive");
  dim_ = n * n - 1;
  basis_.reserve(dim_);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Mat s = Mat::Zero(n, n);
      s(j, k) = cd(0, inv_sqrt2);
      s(k, j) = cd(0, inv_sqrt2);
      basis_.push_back(s);
      Mat a = Mat::Zero(n, n);
      a(j, k) = cd(inv_sqrt2, 0);
      a(k, j) = cd(-inv_sqrt2, 0);
      basis_.push_back(a);
    }
  }
  for (int m = 1; m < n; ++m) {
    Mat d = Mat::Zero(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
    for (int j = 0; j < m; ++j) d(j, j) = cd(0, norm);
    d(m, m) = cd(0, -m * norm);
    basis_.push_back(d);
  }
}

double SuGroup::pairing(const Mat& x, const Mat& y) const {
  if (x.rows() != n_ || y.rows() != n_)
    fail(ErrorCode::kDimensionMismatch, "pairing: wrong matrix dimension");
  return -scale_ * (x * y).trace().real();
}

cd SuGroup::cpairing(const Mat& x, const Mat& y) const {
  return -scale_ * (x * y).trace();
}

Mat SuGroup::group_exp(const Mat& x) const {
  // x = i H with H Hermitian, so exp(x) = V exp(i diag) V^dagger.
  Eigen::SelfAdjointEigenSolver<Mat> es(cd(0, -1) * x);
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXcd phases(n_);
  for (int j = 0; j < n_; ++j) phases[j] = std::exp(cd(0, ev[j]));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat SuGroup::group_log(const Mat& g) const {
  require_group(g, "group_log");
  // A unitary matrix is normal, so its Schur form is diagonal and the Schur
  // vectors give a unitary eigenbasis even for clustered eigenvalues.
  Eigen::ComplexSchur<Mat> schur(g, true);
  const Mat& q = schur.matrixU();
  Eigen::VectorXd phi(n_);
  for (int j = 0; j < n_; ++j) {
    const cd ev = schur.matrixT()(j, j);
    phi[j] = std::atan2(ev.imag(), ev.real());
    if (kPi - std::abs(phi[j]) < 1e-6)
      fail(ErrorCode::kBranchCut,
           "group_log: eigenvalue within 1e-6 of the branch cut at -1");
  }
  // det g = 1 means the phases sum to a multiple of 2 pi; fold that multiple
  // back so the logarithm is traceless while exp(result) stays equal to g.
  int k = static_cast<int>(std::llround(phi.sum() / kTwoPi));
  while (k > 0) {
    int jmax = 0;
    for (int j = 1; j < n_; ++j)
      if (phi[j] > phi[jmax]) jmax = j;
    phi[jmax] -= kTwoPi;
    --k;
  }
  while (k < 0) {
    int jmin = 0;
    for (int j = 1; j < n_; ++j)
      if (phi[j] < phi[jmin]) jmin = j;
    phi[jmin] += kTwoPi;
    ++k;
  }
  Eigen::VectorXcd d(n_);
  for (int j = 0; j < n_; ++j) d[j] = cd(0, phi[j]);
  return q * d.asDiagonal() * q.adjoint();
}

Eigen::MatrixXd SuGroup::adjoint_matrix(const Mat& g) const {
  Eigen::MatrixXd a(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    const Vec col = algebra_coords(adjoint(g, basis_[j]));
    a.col(j) = col;
  }
  return a;
}

Mat SuGroup::alcove_embed(const AlcoveParameter& tau) const {
  if (tau.size() != n_)
    fail(ErrorCode::kDimensionMismatch, "alcove_embed: wrong length");
  Mat e = Mat::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) e(j, j) = std::exp(cd(0, kTwoPi * tau.lambda[j]));
  return e;
}

std::pair<AlcoveParameter, Mat> SuGroup::alcove_decompose(const Mat& g) const {
  require_group(g, "alcove_decompose");
  Eigen::ComplexSchur<Mat> schur(g, true);
  // Eigenphases in turns, folded into [0, 1).
  std::vector<double> p(n_);
  std::vector<int> order(n_);
  for (int j = 0; j < n_; ++j) {
    const cd ev = schur.matrixT()(j, j);
    double t = std::atan2(ev.imag(), ev.real()) / kTwoPi;
    if (t < 0.0) t += 1.0;
    if (t >= 1.0) t -= 1.0;
    p[j] = t;
    order[j] = j;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return p[a] > p[b]; });
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) sum += p[j];
  const int k = static_cast<int>(std::llround(sum));
  // Subtracting one turn from the k largest phases restores sum zero; the
  // rotated ordering (k+1 .. n, then 1-1 .. k-1) is still descending and has
  // spread at most one turn, so it is the canonical alcove representative.
  Vec lambda(n_);
  Mat kmat(n_, n_);
  int out = 0;
  for (int j = k; j < n_; ++j, ++out) {
    lambda[out] = p[order[j]];
    kmat.col(out) = schur.matrixU().col(order[j]);
  }
  for (int j = 0; j < k; ++j, ++out) {
    lambda[out] = p[order[j]] - 1.0;
    kmat.col(out) = schur.matrixU().col(order[j]);
  }
  lambda.array() -= lambda.sum() / n_;  // scrub roundoff in the sum
  const cd det = kmat.determinant();
  kmat.col(0) *= std::conj(det) / std::abs(det);
  return {AlcoveParameter{lambda}, kmat};
}

Mat SuGroup::random_group(Rng& rng) const {
  Mat a(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) a(i, j) = cd(rng.gauss(), rng.gauss());
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n_; ++j) {
    const cd d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= (ad > 0) ? d / ad : cd(1, 0);
  }
  // Push the residual U(1) phase into an n-th root so the result lands in
  // SU(n); left invariance of the construction keeps the law Haar.
  const cd det = q.determinant();
  const double phase = std::atan2(det.imag(), det.real());
  return q * std::exp(cd(0, -phase / n_));
}

Mat SuGroup::random_algebra(Rng& rng) const {
  Vec c(dim_);
  for (int i = 0; i < dim_; ++i) c[i] = rng.gauss();
  return algebra_from_coords(c);
}

AlcoveParameter SuGroup::random_alcove(Rng& rng) const {
  Vec lambda(n_);
  for (int j = 0; j < n_; ++j) lambda[j] = rng.gauss();
  std::sort(lambda.data(), lambda.data() + n_, std::greater<double>());
  lambda.array() -= lambda.sum() / n_;
  const double spread = lambda[0] - lambda[n_ - 1];
  const double target = rng.uniform(0.15, 0.45);
  lambda *= target / spread;
  return AlcoveParameter{lambda};
}

Vec SuGroup::algebra_coords(const Mat& x) const {
  Vec c(dim_);
  for (int i = 0; i < dim_; ++i)
    c[i] = -(basis_[i] * x).trace().real();
  return c;
}

Mat SuGroup::algebra_from_coords(const Vec& c) const {
  Mat x = Mat::Zero(n_, n_);
  for (int i = 0; i < dim_; ++i) x += c[i] * basis_[i];
  return x;
}

double SuGroup::unitary_defect(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  return (m.adjoint() * m - Mat::Identity(n, n)).norm();
}

bool SuGroup::is_group_element(const Mat& m, double tol) const {
  if (m.rows() != n_ || m.cols() != n_) return false;
  if (unitary_defect(m) > tol) return false;
  return std::abs(m.determinant() - cd(1, 0)) <= tol;
}

bool SuGroup::is_algebra_element(const Mat& x, double tol) const {
  if (x.rows() != n_ || x.cols() != n_) return false;
  if ((x + x.adjoint()).norm() > tol) return false;
  return std::abs(x.trace()) <= tol;
}

void SuGroup::require_group(const Mat& m, const char* where) const {
  if (m.rows() != n_ || m.cols() != n_)
    fail(ErrorCode::kDimensionMismatch, std::string(where) + ": wrong size");
}

}  // namespace qham
