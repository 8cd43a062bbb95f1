#include "axiom_check.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace qham {

double calibrate_bracket_sign(const SuGroup& g, Rng& rng) {
  // beta(v) = (dg g^-1(v), c) on M = G.  Along F(s, t) = exp(s u) exp(t v) p
  // the pullback identity gives
  //   d beta(u, v) = d/ds beta(Ad_{exp(s u)} v) - d/dt beta(u),
  // with no bracket convention involved.  The cyclic formula on
  // constant-coordinate fields gives -eps ([u, v], c).
  double acc = 0.0;
  int used = 0;
  const double h = 1e-5;
  for (int trial = 0; trial < 8; ++trial) {
    const Mat u = g.random_algebra(rng);
    const Mat v = g.random_algebra(rng);
    const Mat c = g.random_algebra(rng);
    const auto beta_along = [&](double s) {
      const Mat ad = g.group_exp(s * u) * v * g.group_exp(-s * u);
      return g.pairing(ad, c);
    };
    const double oracle = (beta_along(h) - beta_along(-h)) / (2.0 * h);
    const double denom = g.pairing(SuGroup::bracket(u, v), c);
    if (std::abs(denom) < 1e-6) continue;
    acc += -oracle / denom;
    ++used;
  }
  return used ? acc / used : 0.0;
}

namespace {

double form_on(const Space& s, const Point& p, const Tangent& u,
               const Tangent& v) {
  const Prepared pu = s.prepare(p, 0, u);
  const Prepared pv = s.prepare(p, 0, v);
  return s.form(p, 0, pu, pv);
}

double central_derivative(const Space& s, const Point& p, const Tangent& dir,
                          const Tangent& u, const Tangent& v, double h) {
  const Point plus = flow(s, p, dir, h);
  const Point minus = flow(s, p, dir, -h);
  return (form_on(s, plus, u, v) - form_on(s, minus, u, v)) / (2.0 * h);
}

}  // namespace

double form_derivative(const Space& s, const Point& p, const Tangent& dir,
                       const Tangent& u, const Tangent& v,
                       const DerivativeOptions& opt) {
  const double d1 = central_derivative(s, p, dir, u, v, opt.step);
  if (!opt.richardson) return d1;
  const double d2 = central_derivative(s, p, dir, u, v, 0.5 * opt.step);
  return (4.0 * d2 - d1) / 3.0;
}

double exterior_derivative3(const Space& s, const Point& p, const Tangent& u,
                            const Tangent& v, const Tangent& w,
                            const DerivativeOptions& opt) {
  double d = form_derivative(s, p, u, v, w, opt) +
             form_derivative(s, p, v, w, u, opt) +
             form_derivative(s, p, w, u, v, opt);
  const Tangent uv = coordinate_bracket(s, u, v);
  const Tangent vw = coordinate_bracket(s, v, w);
  const Tangent wu = coordinate_bracket(s, w, u);
  d -= kBracketSign * (form_on(s, p, uv, w) + form_on(s, p, vw, u) +
                       form_on(s, p, wu, v));
  return d;
}

double cubic_term(const Space& s, const Prepared& u, const Prepared& v,
                  const Prepared& w) {
  const SuGroup& g = s.group();
  double acc = 0.0;
  for (int i = 0; i < s.num_factors(); ++i)
    acc += 0.5 * g.pairing(u.theta[i], SuGroup::bracket(v.theta[i], w.theta[i]));
  return acc;
}

KernelComparison compare_form_kernel(const Space& s, const Point& p,
                                     double sv_cut) {
  const SuGroup& g = s.group();
  const int dim_t = tangent_dim(s);
  const int dim_g = g.dim();
  const int nf = s.num_factors();
  const std::vector<Mat> mu = moment_of(s, p);

  std::vector<Prepared> prep(dim_t);
  for (int i = 0; i < dim_t; ++i) {
    Vec e = Vec::Zero(dim_t);
    e[i] = 1.0;
    prep[i] = s.prepare(p, 0, tangent_from_coords(s, e));
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim_t, dim_t);
  for (int i = 0; i < dim_t; ++i)
    for (int j = i + 1; j < dim_t; ++j) {
      const double x = s.form(p, 0, prep[i], prep[j]);
      gram(i, j) = x;
      gram(j, i) = -x;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::MatrixXd kernel_num;
  if (sv[0] < 1e-12) {
    kernel_num = Eigen::MatrixXd::Identity(dim_t, dim_t);
  } else {
    int nkern = 0;
    for (int i = 0; i < dim_t; ++i)
      if (sv[i] <= sv_cut * sv[0]) ++nkern;
    kernel_num = svd.matrixV().rightCols(nkern);
  }

  std::vector<Tangent> pred;
  s.chart_nulls(p, 0, zero_tangent(s), pred);
  for (int i = 0; i < nf; ++i) {
    const Eigen::MatrixXd ad1 =
        g.adjoint_matrix(mu[i]) + Eigen::MatrixXd::Identity(dim_g, dim_g);
    Eigen::JacobiSVD<Eigen::MatrixXd> adsvd(ad1, Eigen::ComputeFullV);
    const auto& asv = adsvd.singularValues();
    for (int k = 0; k < dim_g; ++k) {
      if (asv[k] > 1e-7) continue;
      std::vector<Mat> zeta(nf, Mat::Zero(g.n(), g.n()));
      zeta[i] = g.algebra_from_coords(adsvd.matrixV().col(k));
      pred.push_back(infinitesimal_action(s, zeta, p));
    }
  }
  Eigen::MatrixXd pred_cols(dim_t, pred.size());
  for (size_t k = 0; k < pred.size(); ++k)
    pred_cols.col(k) = tangent_to_coords(s, pred[k]);

  KernelComparison out;
  const Eigen::MatrixXd a = orthonormal_span(kernel_num);
  const Eigen::MatrixXd b = orthonormal_span(pred_cols, 1e-8);
  out.numeric_dim = static_cast<int>(a.cols());
  out.predicted_dim = static_cast<int>(b.cols());
  const bool parity_partner = (dim_t - out.predicted_dim) % 2 == 1;
  out.dims_consistent =
      out.numeric_dim == out.predicted_dim + (parity_partner ? 1 : 0);
  if (out.predicted_dim == 0 || out.numeric_dim == 0) {
    out.angle = (out.predicted_dim > out.numeric_dim) ? 0.5 * kPi : 0.0;
    return out;
  }
  // Containment of the prediction in the numerical kernel.
  Eigen::JacobiSVD<Eigen::MatrixXd> cs(a.transpose() * b);
  const double smin = cs.singularValues().minCoeff();
  out.angle = std::acos(std::clamp(smin, -1.0, 1.0));
  return out;
}

Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& columns,
                                 double rel_cut) {
  if (columns.cols() == 0) return Eigen::MatrixXd(columns.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = rel_cut * std::max(sv[0], 1e-300);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) return 0.5 * kPi;
  if (a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double smin = svd.singularValues().minCoeff();
  return std::acos(std::clamp(smin, -1.0, 1.0));
}

AxiomReport check_axioms(const Space& s, int n_samples, std::uint64_t seed,
                         const AxiomTolerances& tol,
                         const DerivativeOptions& opt, int triples_per_sample) {
  const SuGroup& g = s.group();
  const int nf = s.num_factors();
  Rng rng(seed);

  AxiomReport rep;
  rep.samples = n_samples;
  rep.seed = seed;

  for (int sample = 0; sample < n_samples; ++sample) {
    const Point p = sample_point(s, rng);
    std::vector<Mat> mu = moment_of(s, p);

    // (qh1) equivariance of the moment tuple.
    {
      std::vector<Mat> gg(nf);
      for (int i = 0; i < nf; ++i) gg[i] = g.random_group(rng);
      const Point q = act_on(s, gg, p);
      const std::vector<Mat> mu_q = moment_of(s, q);
      double r = 0.0;
      for (int i = 0; i < nf; ++i)
        r = std::max(r, (mu_q[i] - gg[i] * mu[i] * gg[i].adjoint()).norm());
      rep.equivariance.max_residual = std::max(rep.equivariance.max_residual, r);
    }

    // (qh2) d Omega + (1/12) sum_i mu_i^*(theta, [theta, theta]) = 0.
    for (int t = 0; t < triples_per_sample; ++t) {
      const Tangent u = random_tangent(s, rng);
      const Tangent v = random_tangent(s, rng);
      const Tangent w = random_tangent(s, rng);
      const double d = exterior_derivative3(s, p, u, v, w, opt);
      const Prepared pu = s.prepare(p, 0, u);
      const Prepared pv = s.prepare(p, 0, v);
      const Prepared pw = s.prepare(p, 0, w);
      const double r = std::abs(d + cubic_term(s, pu, pv, pw));
      rep.d_omega.max_residual = std::max(rep.d_omega.max_residual, r);
    }

    // (qh3) iota(zeta_M) Omega = 1/2 (mu^*(theta + theta_bar), zeta).
    for (int t = 0; t < 3; ++t) {
      std::vector<Mat> zeta(nf);
      for (int i = 0; i < nf; ++i) zeta[i] = g.random_algebra(rng);
      const Tangent zm = infinitesimal_action(s, zeta, p);
      const Tangent v = random_tangent(s, rng);
      const Prepared pz = s.prepare(p, 0, zm);
      const Prepared pv = s.prepare(p, 0, v);
      double rhs = 0.0;
      for (int i = 0; i < nf; ++i)
        rhs += 0.5 * g.pairing(pv.theta[i] + pv.theta_bar[i], zeta[i]);
      const double r = std::abs(s.form(p, 0, pz, pv) - rhs);
      rep.moment_pairing.max_residual =
          std::max(rep.moment_pairing.max_residual, r);
    }

    // (qh4) Ker(Omega) = chart nulls + {zeta_M : zeta in Ker(Ad_mu + Id)}.
    {
      const KernelComparison kc = compare_form_kernel(s, p, tol.kernel_sv);
      const double angle = kc.dims_consistent ? kc.angle : 0.5 * kPi;
      rep.kernel.max_residual = std::max(rep.kernel.max_residual, angle);
    }
  }

  rep.equivariance.tolerance = tol.equivariance;
  rep.d_omega.tolerance = tol.d_omega;
  rep.moment_pairing.tolerance = tol.moment_pairing;
  rep.kernel.tolerance = tol.kernel_angle;
  rep.equivariance.pass = rep.equivariance.max_residual <= tol.equivariance;
  rep.d_omega.pass = rep.d_omega.max_residual <= tol.d_omega;
  rep.moment_pairing.pass = rep.moment_pairing.max_residual <= tol.moment_pairing;
  rep.kernel.pass = rep.kernel.max_residual <= tol.kernel_angle;
  return rep;
}

}  // namespace qham
