#include "loop_space.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "errors.hpp"
#include "json.hpp"

namespace qham {

namespace {

int wrap_index(int j, int n) { return ((j % n) + n) % n; }

Mat idiag(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Mat m = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = cd(0, v[k]);
  return m;
}

/// Signed order-reversing permutation with determinant one.
Mat reversal_permutation(int n) {
  Mat p = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, n - 1 - i) = 1.0;
  if ((n / 2) % 2 == 1) p.col(0) *= -1.0;  // parity of the reversal
  return p;
}

/// Trigonometric interpolant of periodic matrix-valued node data.  The
/// Nyquist component is represented by the minimal-oscillation cos(N s / 2)
/// term so that no node information is lost.
struct TrigMat {
  int kmax = 0;
  int nyquist = 0;  // N/2; the cos-mode frequency
  std::vector<Mat> coef;  // index k + kmax, k in [-kmax, kmax]
  Mat nyq;
  bool deriv = false;

  Mat eval(double sigma) const {
    Mat out = Mat::Zero(coef[0].rows(), coef[0].cols());
    for (int k = -kmax; k <= kmax; ++k)
      out += std::exp(cd(0, k * sigma)) * coef[k + kmax];
    if (!deriv)
      out += std::cos(nyquist * sigma) * nyq;
    else
      out += -static_cast<double>(nyquist) * std::sin(nyquist * sigma) * nyq;
    return out;
  }

  TrigMat derivative() const {
    TrigMat d = *this;
    for (int k = -kmax; k <= kmax; ++k) d.coef[k + kmax] *= cd(0, k);
    d.deriv = true;
    return d;
  }
};

TrigMat trig_fit(const std::vector<Mat>& nodes) {
  const int n = static_cast<int>(nodes.size());
  TrigMat t;
  t.kmax = n / 2 - 1;
  t.nyquist = n / 2;
  t.coef.assign(2 * t.kmax + 1, Mat::Zero(nodes[0].rows(), nodes[0].cols()));
  for (int k = -t.kmax; k <= t.kmax; ++k) {
    Mat c = Mat::Zero(nodes[0].rows(), nodes[0].cols());
    for (int j = 0; j < n; ++j)
      c += std::exp(cd(0, -k * kTwoPi * j / n)) * nodes[j];
    t.coef[k + t.kmax] = c / static_cast<double>(n);
  }
  Mat c = Mat::Zero(nodes[0].rows(), nodes[0].cols());
  for (int j = 0; j < n; ++j) c += ((j % 2 == 0) ? 1.0 : -1.0) * nodes[j];
  t.nyq = c / static_cast<double>(n);
  return t;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

Mat chart_phase(const Vec& lambda, double sigma) {
  const int n = static_cast<int>(lambda.size());
  Mat e = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) e(k, k) = std::exp(cd(0, sigma * lambda[k]));
  return e;
}

Mat loop_value(const LoopPoint& lp, int j) {
  const int n = lp.nodes();
  const double sigma = kTwoPi * j / n;
  return lp.h[wrap_index(j, n)] * chart_phase(lp.lambda, sigma) *
         lp.g0.adjoint();
}

Mat loop_monodromy(const LoopPoint& lp) {
  return lp.g0 * chart_phase(lp.lambda, kTwoPi) * lp.g0.adjoint();
}

Mat loop_moment(const SuGroup&, const LoopPoint& lp) {
  return lp.g0 * chart_phase(lp.lambda, -kTwoPi) * lp.g0.adjoint();
}

Mat loop_moment_direct(const LoopPoint& lp) {
  return loop_value(lp, lp.nodes()).adjoint() * loop_value(lp, 0);
}

Mat loop_rho(const SuGroup&, const LoopPoint& lp, const LoopTangent& t, int j) {
  const int n = lp.nodes();
  const int idx = wrap_index(j, n);
  const double sigma = kTwoPi * j / n;
  const Mat l = loop_value(lp, j);
  Mat rho = t.eta[idx];
  rho += sigma * (lp.h[idx] * idiag(t.dlambda) * lp.h[idx].adjoint());
  rho -= l * t.zeta0 * l.adjoint();
  return rho;
}

Mat loop_xi(const SuGroup&, const LoopPoint& lp, const LoopTangent& t, int j) {
  const int n = lp.nodes();
  const int idx = wrap_index(j, n);
  const double sigma = kTwoPi * j / n;
  const Mat l = loop_value(lp, j);
  Mat xi = l.adjoint() * t.eta[idx] * l;
  xi += sigma * (lp.g0 * idiag(t.dlambda) * lp.g0.adjoint());
  xi -= t.zeta0;
  return xi;
}

Mat loop_theta(const SuGroup& g, const LoopPoint& lp, const LoopTangent& t) {
  const Mat mu = loop_moment(g, lp);
  return mu.adjoint() * t.zeta0 * mu - t.zeta0 -
         kTwoPi * (lp.g0 * idiag(t.dlambda) * lp.g0.adjoint());
}

LoopPoint random_loop(const SuGroup& g, int grid, Rng& rng) {
  LoopPoint lp;
  constexpr int kModes = 3;
  std::vector<Mat> ac, bc;
  for (int m = 0; m <= kModes; ++m) {
    const double w = 0.3 / (1.0 + m * m);
    ac.push_back(w * g.random_algebra(rng));
    bc.push_back(w * g.random_algebra(rng));
  }
  lp.h.resize(grid);
  for (int j = 0; j < grid; ++j) {
    const double sigma = kTwoPi * j / grid;
    Mat f = Mat::Zero(g.n(), g.n());
    for (int m = 0; m <= kModes; ++m)
      f += std::cos(m * sigma) * ac[m] + std::sin(m * sigma) * bc[m];
    lp.h[j] = g.group_exp(f);
  }
  AlcoveParameter tau = g.random_alcove(rng);
  while (tau.interior_margin() < 0.02) tau = g.random_alcove(rng);
  lp.lambda = tau.lambda;
  lp.g0 = g.random_group(rng);
  return lp;
}

LoopQuad trapezoid_rule(int grid) {
  LoopQuad q;
  const double ds = kTwoPi / grid;
  q.sigma.resize(grid + 1);
  q.weight.resize(grid + 1);
  for (int j = 0; j <= grid; ++j) {
    q.sigma[j] = ds * j;
    q.weight[j] = (j == 0 || j == grid) ? 0.5 * ds : ds;
  }
  return q;
}

LoopQuad gauss_rule(int panels, int points) {
  std::vector<double> x, w;
  gauss_legendre(points, x, w);
  LoopQuad q;
  const double width = kTwoPi / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = width * p;
    for (int i = 0; i < points; ++i) {
      q.sigma.push_back(a + 0.5 * width * (x[i] + 1.0));
      q.weight.push_back(0.5 * width * w[i]);
    }
  }
  return q;
}

PreparedLoop prepare_loop(const SuGroup& g, const LoopPoint& lp,
                          const LoopTangent& t, const LoopQuad& quad,
                          bool spectral) {
  PreparedLoop out;
  const int nq = static_cast<int>(quad.sigma.size());
  out.xi.resize(nq);
  out.dxi.resize(nq);
  if (!spectral) {
    // Quadrature nodes are the chart nodes 0..N; ghost values come from the
    // chart itself, so the central differences see exact neighbors.
    const int n = lp.nodes();
    std::vector<Mat> xi_ext(n + 3);  // j = -1 .. N+1
    for (int j = -1; j <= n + 1; ++j) xi_ext[j + 1] = loop_xi(g, lp, t, j);
    const double ds = kTwoPi / n;
    for (int j = 0; j <= n; ++j) {
      out.xi[j] = xi_ext[j + 1];
      out.dxi[j] = (xi_ext[j + 2] - xi_ext[j]) / (2.0 * ds);
    }
  } else {
    const TrigMat hfit = trig_fit(lp.h);
    const TrigMat hder = hfit.derivative();
    const TrigMat efit = trig_fit(t.eta);
    const TrigMat eder = efit.derivative();
    const Mat ilam = idiag(lp.lambda);
    const Mat idl = idiag(t.dlambda);
    const Mat cg0 = lp.g0 * idl * lp.g0.adjoint();
    for (int qi = 0; qi < nq; ++qi) {
      const double sigma = quad.sigma[qi];
      const Mat h = hfit.eval(sigma);
      const Mat hinv = h.inverse();
      const Mat eta = efit.eval(sigma);
      const Mat deta = eder.eval(sigma);
      const Mat ephase = chart_phase(lp.lambda, sigma);
      const Mat l = h * ephase * lp.g0.adjoint();
      const Mat linv = lp.g0 * ephase.adjoint() * hinv;
      const Mat j_cur = hder.eval(sigma) * hinv + h * ilam * hinv;
      out.xi[qi] = linv * eta * l + sigma * cg0 - t.zeta0;
      out.dxi[qi] = linv * (deta - j_cur * eta + eta * j_cur) * l + cg0;
    }
  }
  out.rho0 = loop_rho(g, lp, t, 0);
  out.rho2pi = loop_rho(g, lp, t, lp.nodes());
  return out;
}

double omega_loop(const SuGroup& g, const LoopQuad& quad, const PreparedLoop& u,
                  const PreparedLoop& v) {
  double bulk = 0.0;
  for (size_t q = 0; q < quad.sigma.size(); ++q)
    bulk += quad.weight[q] *
            (g.pairing(u.xi[q], v.dxi[q]) - g.pairing(v.xi[q], u.dxi[q]));
  const double bnd =
      g.pairing(u.rho0, v.rho2pi) - g.pairing(v.rho0, u.rho2pi);
  return 0.5 * bulk + 0.5 * bnd;
}

namespace {

std::vector<Mat> current_nodes(const LoopPoint& lp) {
  const int n = lp.nodes();
  const double ds = kTwoPi / n;
  const Mat ilam = idiag(lp.lambda);
  std::vector<Mat> j_nodes(n);
  for (int j = 0; j < n; ++j) {
    const Mat dh =
        (lp.h[wrap_index(j + 1, n)] - lp.h[wrap_index(j - 1, n)]) / (2.0 * ds);
    j_nodes[j] = dh * lp.h[j].adjoint() + lp.h[j] * ilam * lp.h[j].adjoint();
  }
  return j_nodes;
}

}  // namespace

double loop_hamiltonian(const SuGroup& g, const LoopPoint& lp, bool spectral) {
  if (!spectral) {
    const std::vector<Mat> j_nodes = current_nodes(lp);
    const double ds = kTwoPi / lp.nodes();
    double sum = 0.0;
    for (const Mat& j : j_nodes) sum += g.pairing(j, j);
    return -0.5 * sum * ds;
  }
  const LoopQuad quad = gauss_rule();
  const TrigMat hfit = trig_fit(lp.h);
  const TrigMat hder = hfit.derivative();
  const Mat ilam = idiag(lp.lambda);
  double sum = 0.0;
  for (size_t q = 0; q < quad.sigma.size(); ++q) {
    const Mat h = hfit.eval(quad.sigma[q]);
    const Mat hinv = h.inverse();
    const Mat j = hder.eval(quad.sigma[q]) * hinv + h * ilam * hinv;
    sum += quad.weight[q] * g.pairing(j, j);
  }
  return -0.5 * sum;
}

double loop_hamiltonian_gradient(const SuGroup& g, const LoopPoint& lp,
                                 const LoopTangent& t, bool spectral) {
  const Mat dlam = idiag(t.dlambda);
  if (!spectral) {
    const int n = lp.nodes();
    const double ds = kTwoPi / n;
    const std::vector<Mat> j_nodes = current_nodes(lp);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const Mat deta =
          (t.eta[wrap_index(j + 1, n)] - t.eta[wrap_index(j - 1, n)]) /
          (2.0 * ds);
      Mat dj = deta + t.eta[j] * j_nodes[j] - j_nodes[j] * t.eta[j];
      dj += lp.h[j] * dlam * lp.h[j].adjoint();
      sum += g.pairing(j_nodes[j], dj);
    }
    return -sum * ds;
  }
  const LoopQuad quad = gauss_rule();
  const TrigMat hfit = trig_fit(lp.h);
  const TrigMat hder = hfit.derivative();
  const TrigMat efit = trig_fit(t.eta);
  const TrigMat eder = efit.derivative();
  const Mat ilam = idiag(lp.lambda);
  double sum = 0.0;
  for (size_t q = 0; q < quad.sigma.size(); ++q) {
    const double sigma = quad.sigma[q];
    const Mat h = hfit.eval(sigma);
    const Mat hinv = h.inverse();
    const Mat j = hder.eval(sigma) * hinv + h * ilam * hinv;
    const Mat eta = efit.eval(sigma);
    Mat dj = eder.eval(sigma) + eta * j - j * eta;
    dj += h * dlam * hinv;
    sum += quad.weight[q] * g.pairing(j, dj);
  }
  return -sum;
}

std::vector<Mat> chiral_moment_density(const SuGroup& g, const LoopPoint& lp) {
  std::vector<Mat> phi = current_nodes(lp);
  for (Mat& m : phi) m = -m;
  return phi;
}

double omega_chart_expansion(const SuGroup& g, const LoopPoint& lp,
                             const LoopTangent& u, const LoopTangent& v) {
  const LoopQuad quad = gauss_rule();
  const TrigMat hfit = trig_fit(lp.h);
  const TrigMat hder = hfit.derivative();
  const TrigMat ufit = trig_fit(u.eta);
  const TrigMat uder = ufit.derivative();
  const TrigMat vfit = trig_fit(v.eta);
  const TrigMat vder = vfit.derivative();

  const Mat lam = cd(0, -1) * idiag(lp.lambda);   // real diagonal tau
  const Mat dlam_u = cd(0, -1) * idiag(u.dlambda);
  const Mat dlam_v = cd(0, -1) * idiag(v.dlambda);

  double term_a = 0.0;
  cd term_b = 0.0;
  for (size_t q = 0; q < quad.sigma.size(); ++q) {
    const double sigma = quad.sigma[q];
    const Mat h = hfit.eval(sigma);
    const Mat hinv = h.inverse();
    const Mat kh = hder.eval(sigma) * hinv;
    // xih = h^-1 dh and its exact sigma derivative.
    const Mat eu = ufit.eval(sigma);
    const Mat ev = vfit.eval(sigma);
    const Mat xu = hinv * eu * h;
    const Mat xv = hinv * ev * h;
    const Mat dxu = hinv * (uder.eval(sigma) - kh * eu + eu * kh) * h;
    const Mat dxv = hinv * (vder.eval(sigma) - kh * ev + ev * kh) * h;
    term_a += quad.weight[q] * (g.pairing(xu, dxv) - g.pairing(xv, dxu));
    term_b += quad.weight[q] *
              (g.cpairing(dlam_u, xv) - g.cpairing(dlam_v, xu) -
               g.cpairing(lam, SuGroup::bracket(xu, xv)));
  }

  const Mat z0u = lp.g0.adjoint() * u.zeta0 * lp.g0;
  const Mat z0v = lp.g0.adjoint() * v.zeta0 * lp.g0;
  const cd term_c = g.cpairing(dlam_u, z0v) - g.cpairing(dlam_v, z0u);
  const Mat e2pi = chart_phase(lp.lambda, kTwoPi);
  const double term_d =
      0.5 * (g.pairing(z0u, e2pi * z0v * e2pi.adjoint()) -
             g.pairing(z0v, e2pi * z0u * e2pi.adjoint()));

  return 0.5 * term_a + (cd(0, -1) * term_b).real() +
         (cd(0, kTwoPi) * term_c).real() + term_d;
}

LoopPoint loop_reverse(const SuGroup& g, const LoopPoint& lp) {
  const int n = g.n();
  const int grid = lp.nodes();
  LoopPoint out;
  out.lambda = Vec(n);
  for (int k = 0; k < n; ++k) out.lambda[k] = -lp.lambda[n - 1 - k];
  const Mat p = reversal_permutation(n);
  out.g0 = lp.g0 * p;
  out.h.resize(grid);
  for (int j = 0; j < grid; ++j) {
    const Mat lrev = loop_value(lp, grid - j);  // l(2 pi - sigma_j)
    out.h[j] = lrev * out.g0 * chart_phase(out.lambda, kTwoPi * j / grid).adjoint();
  }
  return out;
}

LoopTangent loop_reverse_push(const SuGroup& g, const LoopPoint& lp,
                              const LoopPoint& rev, const LoopTangent& t) {
  const int n = g.n();
  const int grid = lp.nodes();
  LoopTangent out;
  out.zeta0 = t.zeta0;
  out.dlambda = Vec(n);
  for (int k = 0; k < n; ++k) out.dlambda[k] = -t.dlambda[n - 1 - k];
  const Mat idl = idiag(out.dlambda);
  out.eta.resize(grid);
  for (int j = 0; j < grid; ++j) {
    const double sigma = kTwoPi * j / grid;
    const Mat lrev = loop_value(rev, j);
    Mat eta = loop_rho(g, lp, t, grid - j);
    eta += lrev * t.zeta0 * lrev.adjoint();
    const Mat lg = lrev * rev.g0;
    eta -= sigma * (lg * idl * lg.adjoint());
    out.eta[j] = eta;
  }
  return out;
}

std::vector<Mat> holonomy(const SuGroup& g, const std::vector<Mat>& density) {
  const int n = static_cast<int>(density.size());
  const double ds = kTwoPi / n;
  std::vector<Mat> w(n + 1);
  w[0] = g.identity();
  for (int j = 0; j < n; ++j) {
    const Mat mid = 0.5 * (density[j] + density[wrap_index(j + 1, n)]);
    w[j + 1] = w[j] * g.group_exp(ds * mid);
  }
  return w;
}

std::vector<Mat> holonomy_left(const SuGroup& g,
                               const std::vector<Mat>& density) {
  const int n = static_cast<int>(density.size());
  const double ds = kTwoPi / n;
  std::vector<Mat> w(n + 1);
  w[0] = g.identity();
  for (int j = 0; j < n; ++j) {
    const Mat mid = 0.5 * (density[j] + density[wrap_index(j + 1, n)]);
    w[j + 1] = g.group_exp(ds * mid) * w[j];
  }
  return w;
}

namespace {

LoopPoint fit_loop_from_nodes(const SuGroup& g, const std::vector<Mat>& nodes) {
  // nodes has N+1 values of a quasi-periodic map; the monodromy is
  // nodes[0]^-1 nodes[N].
  const int grid = static_cast<int>(nodes.size()) - 1;
  const Mat mono = nodes[0].adjoint() * nodes[grid];
  auto [tau, k] = g.alcove_decompose(mono);
  LoopPoint lp;
  lp.lambda = tau.lambda;
  lp.g0 = k;
  lp.h.resize(grid);
  for (int j = 0; j < grid; ++j)
    lp.h[j] =
        nodes[j] * lp.g0 * chart_phase(lp.lambda, kTwoPi * j / grid).adjoint();
  return lp;
}

}  // namespace

Factorization factorize_wznw(const SuGroup& g, const std::vector<Mat>& j_left,
                             const std::vector<Mat>& g_field) {
  const int n = static_cast<int>(j_left.size());
  std::vector<Mat> gf = g_field;
  if (static_cast<int>(gf.size()) == n + 1) {
    if ((gf[n] - gf[0]).norm() > 1e-9)
      fail(ErrorCode::kNonPeriodic, "factorize_wznw: field grid not periodic");
    gf.pop_back();
  }
  if (static_cast<int>(gf.size()) != n)
    fail(ErrorCode::kDimensionMismatch, "factorize_wznw: grid size mismatch");

  const double ds = kTwoPi / n;
  std::vector<Mat> j_right(n);
  for (int j = 0; j < n; ++j) {
    const Mat dg = (gf[wrap_index(j + 1, n)] - gf[wrap_index(j - 1, n)]) /
                   (2.0 * ds);
    j_right[j] = -gf[j].adjoint() * j_left[j] * gf[j] + gf[j].adjoint() * dg;
  }
  const std::vector<Mat> gl = holonomy_left(g, j_left);
  const std::vector<Mat> gr = holonomy(g, j_right);

  double b_const = 0.0;
  const Mat b0 = gf[0];
  for (int j = 1; j < n; ++j) {
    const Mat b = gl[j].adjoint() * gf[j] * gr[j].adjoint();
    b_const = std::max(b_const, (b - b0).norm());
  }

  std::vector<Mat> l_nodes(n + 1);
  for (int j = 0; j <= n; ++j) l_nodes[j] = gl[j] * gf[0];
  const Mat mu_direct = l_nodes[n].adjoint() * l_nodes[0];

  Factorization out;
  out.l = fit_loop_from_nodes(g, l_nodes);
  out.g_r = fit_loop_from_nodes(g, gr);
  out.j_right = j_right;
  out.b_constancy = b_const;
  out.moment_match = (mu_direct - gr[n]).norm();
  return out;
}

double wznw_hamiltonian(const SuGroup& g, const std::vector<Mat>& j_left,
                        const std::vector<Mat>& j_right) {
  const double ds = kTwoPi / j_left.size();
  double sum = 0.0;
  for (const Mat& j : j_left) sum += g.pairing(j, j);
  for (const Mat& j : j_right) sum += g.pairing(j, j);
  return -0.5 * sum * ds;
}

// ---------------------------------------------------------------------------
// WznwSpace
// ---------------------------------------------------------------------------

WznwSpace::WznwSpace(const SuGroup* g, int grid, bool spectral)
    : Space(spectral ? "W(spectral)" : "W", g,
            {SlotDesc{SlotKind::kLoop, grid}}, 1),
      grid_(grid),
      spectral_(spectral),
      quad_(spectral ? gauss_rule() : trapezoid_rule(grid)) {
  if (grid < 8 || grid % 2 != 0)
    fail(ErrorCode::kBadConfig, "loop grid must be even and at least 8");
}

void WznwSpace::sample(Rng& rng, Point& p, int slot0) const {
  p.slots[slot0] = random_loop(*group_, grid_, rng);
}

void WznwSpace::moment(const Point& p, int slot0, Mat* out) const {
  out[0] = loop_moment(*group_, std::get<LoopPoint>(p.slots[slot0]));
}

void WznwSpace::act(const Mat* g, const Point& p, int slot0, Point& out) const {
  LoopPoint lp = std::get<LoopPoint>(p.slots[slot0]);
  lp.g0 = g[0] * lp.g0;
  out.slots[slot0] = std::move(lp);
}

void WznwSpace::push(const Mat* g, const Point&, int slot0, const Tangent& t,
                     Tangent& out) const {
  LoopTangent lt = std::get<LoopTangent>(t.slots[slot0]);
  lt.zeta0 = g[0] * lt.zeta0 * g[0].adjoint();
  out.slots[slot0] = std::move(lt);
}

void WznwSpace::inf_action(const Mat* zeta, const Point& p, int slot0,
                           Tangent& out) const {
  const LoopPoint& lp = std::get<LoopPoint>(p.slots[slot0]);
  LoopTangent lt;
  lt.eta.assign(lp.nodes(), Mat::Zero(group_->n(), group_->n()));
  lt.dlambda = Vec::Zero(group_->n());
  lt.zeta0 = zeta[0];
  out.slots[slot0] = std::move(lt);
}

Prepared WznwSpace::prepare(const Point& p, int slot0, const Tangent& t) const {
  const LoopPoint& lp = std::get<LoopPoint>(p.slots[slot0]);
  const LoopTangent& lt = std::get<LoopTangent>(t.slots[slot0]);
  Prepared out;
  out.loop.push_back(prepare_loop(*group_, lp, lt, quad_, spectral_));
  const Mat theta = loop_theta(*group_, lp, lt);
  const Mat mu = loop_moment(*group_, lp);
  out.theta.push_back(theta);
  out.theta_bar.push_back(mu * theta * mu.adjoint());
  return out;
}

double WznwSpace::form(const Point&, int, const Prepared& u,
                       const Prepared& v) const {
  return omega_loop(*group_, quad_, u.loop[0], v.loop[0]);
}

void WznwSpace::chart_nulls(const Point& p, int slot0, const Tangent& zero,
                            std::vector<Tangent>& out) const {
  // Chart gauge: (h, g0) -> (h t^-1, g0 t^-1) for t in the maximal torus
  // leaves every l(sigma) fixed.
  const LoopPoint& lp = std::get<LoopPoint>(p.slots[slot0]);
  const int n = group_->n();
  for (int m = 0; m + 1 < n; ++m) {
    const Mat zt = idiag(alcove_direction_basis(n, m));
    Tangent t = zero;
    LoopTangent lt;
    lt.eta.resize(lp.nodes());
    for (int j = 0; j < lp.nodes(); ++j)
      lt.eta[j] = -lp.h[j] * zt * lp.h[j].adjoint();
    lt.dlambda = Vec::Zero(n);
    lt.zeta0 = -lp.g0 * zt * lp.g0.adjoint();
    t.slots[slot0] = std::move(lt);
    out.push_back(std::move(t));
  }
}

void WznwSpace::solve_moment(const Mat& target, Rng& rng, Point& p,
                             int slot0) const {
  // mu = g0 exp(-2 pi i diag(lambda)) g0^-1 = target, solved through the
  // alcove decomposition of the target; h stays a free smooth sample.
  auto [tau, k] = group_->alcove_decompose(target);
  const int n = group_->n();
  LoopPoint lp = random_loop(*group_, grid_, rng);
  Vec lambda(n);
  for (int j = 0; j < n; ++j) lambda[j] = -tau.lambda[n - 1 - j];
  lp.lambda = lambda;
  lp.g0 = k * reversal_permutation(n);
  p.slots[slot0] = std::move(lp);
}

SpacePtr make_wznw(const SuGroup* g, int grid, bool spectral) {
  return std::make_shared<WznwSpace>(g, grid, spectral);
}

EvolutionResult evolution_field(const WznwSpace& w, const LoopPoint& lp) {
  const SuGroup& g = w.group();
  // The defining conditions are solved on the converged (spectral)
  // evaluation of Omega and dH; the trapezoid pair is only second-order
  // consistent and would leave an O(dsigma^2) least-squares defect.
  const WznwSpace* ws = &w;
  std::unique_ptr<WznwSpace> owned;
  if (!w.spectral()) {
    owned = std::make_unique<WznwSpace>(&g, w.grid(), true);
    ws = owned.get();
  }
  Point p;
  p.slots.emplace_back(lp);
  const int dim = tangent_dim(*ws);

  std::vector<Tangent> basis(dim);
  std::vector<Prepared> prep(dim);
  Vec dh(dim);
  Eigen::MatrixXd cons(g.dim(), dim);
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    basis[i] = tangent_from_coords(*ws, e);
    prep[i] = ws->prepare(p, 0, basis[i]);
    dh[i] = loop_hamiltonian_gradient(
        g, lp, std::get<LoopTangent>(basis[i].slots[0]), true);
    cons.col(i) = g.algebra_coords(prep[i].theta[0]);
  }
  Eigen::MatrixXd gram(dim, dim);
  for (int i = 0; i < dim; ++i) {
    gram(i, i) = 0.0;
    for (int j = i + 1; j < dim; ++j) {
      const double v = ws->form(p, 0, prep[i], prep[j]);
      gram(i, j) = v;
      gram(j, i) = -v;
    }
  }

  // Stack iota(v)Omega = dH over the basis with the moment condition.
  Eigen::MatrixXd sys(dim + g.dim(), dim);
  sys.topRows(dim) = -gram;
  sys.bottomRows(g.dim()) = cons;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + g.dim());
  rhs.head(dim) = dh;
  const Eigen::VectorXd x =
      sys.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

  EvolutionResult out;
  out.field = std::get<LoopTangent>(tangent_from_coords(*ws, x).slots[0]);
  out.form_residual = (-gram * x - dh).lpNorm<Eigen::Infinity>();
  out.moment_residual = (cons * x).lpNorm<Eigen::Infinity>();
  const Mat mu = loop_moment(g, lp);
  const Eigen::MatrixXd ad1 =
      g.adjoint_matrix(mu) + Eigen::MatrixXd::Identity(g.dim(), g.dim());
  const Eigen::VectorXd sv = ad1.jacobiSvd().singularValues();
  out.conditioning_warning = sv[sv.size() - 1] < 1e-6;
  return out;
}

// ---------------------------------------------------------------------------
// JSON fixtures
// ---------------------------------------------------------------------------

namespace {

nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      a.push_back({m(i, j).real(), m(i, j).imag()});
  return a;
}

Mat mat_from_json(const nlohmann::json& a, int n) {
  Mat m(n, n);
  int at = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j, ++at)
      m(i, j) = cd(a.at(at).at(0).get<double>(), a.at(at).at(1).get<double>());
  return m;
}

}  // namespace

std::string loop_to_json(const LoopPoint& lp) {
  nlohmann::json j;
  j["n"] = lp.g0.rows();
  j["grid"] = lp.nodes();
  j["lambda"] = std::vector<double>(lp.lambda.data(),
                                    lp.lambda.data() + lp.lambda.size());
  j["g0"] = mat_to_json(lp.g0);
  nlohmann::json h = nlohmann::json::array();
  for (const Mat& m : lp.h) h.push_back(mat_to_json(m));
  j["h"] = h;
  return j.dump();
}

LoopPoint loop_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const int grid = j.at("grid").get<int>();
  LoopPoint lp;
  const auto lam = j.at("lambda").get<std::vector<double>>();
  lp.lambda = Eigen::Map<const Vec>(lam.data(), lam.size());
  lp.g0 = mat_from_json(j.at("g0"), n);
  lp.h.resize(grid);
  for (int i = 0; i < grid; ++i) lp.h[i] = mat_from_json(j.at("h").at(i), n);
  return lp;
}

}  // namespace qham
