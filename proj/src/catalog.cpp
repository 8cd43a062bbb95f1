#include "catalog.hpp"

#include <Eigen/SVD>

#include "errors.hpp"

namespace qham {

namespace {

Mat conj_by(const Mat& g, const Mat& x) { return g * x * g.adjoint(); }
Mat conj_inv(const Mat& g, const Mat& x) { return g.adjoint() * x * g; }

// ---------------------------------------------------------------------------

class ConjugacyClassSpace final : public Space {
 public:
  ConjugacyClassSpace(const SuGroup* g, const AlcoveParameter& tau)
      : Space("C", g, {SlotDesc{SlotKind::kGroup, 0}}, 1),
        tau_(tau),
        embed_(g->alcove_embed(tau)) {
    if (!tau.valid())
      fail(ErrorCode::kBadConfig, "conjugacy_class: invalid alcove parameter");
  }

  const AlcoveParameter& tau() const { return tau_; }

  void sample(Rng& rng, Point& p, int slot0) const override {
    p.slots[slot0] = group_->random_group(rng);
  }

  void moment(const Point& p, int slot0, Mat* out) const override {
    const Mat& k = std::get<Mat>(p.slots[slot0]);
    out[0] = k * embed_ * k.adjoint();
  }

  void act(const Mat* g, const Point& p, int slot0, Point& out) const override {
    out.slots[slot0] = (g[0] * std::get<Mat>(p.slots[slot0])).eval();
  }

  void push(const Mat* g, const Point&, int slot0, const Tangent& t,
            Tangent& out) const override {
    out.slots[slot0] = conj_by(g[0], std::get<Mat>(t.slots[slot0]));
  }

  void inf_action(const Mat* zeta, const Point&, int slot0,
                  Tangent& out) const override {
    out.slots[slot0] = zeta[0];
  }

  Prepared prepare(const Point& p, int slot0, const Tangent& t) const override {
    const Mat& k = std::get<Mat>(p.slots[slot0]);
    const Mat& eta = std::get<Mat>(t.slots[slot0]);
    const Mat f = k * embed_ * k.adjoint();
    Prepared out;
    out.eta.push_back(eta);
    out.eta.push_back(conj_by(f, eta));  // Ad_f eta, cached for the form
    out.theta.push_back(conj_inv(f, eta) - eta);
    out.theta_bar.push_back(eta - conj_by(f, eta));
    return out;
  }

  double form(const Point&, int, const Prepared& u,
              const Prepared& v) const override {
    return 0.5 * (group_->pairing(v.eta[0], u.eta[1]) -
                  group_->pairing(u.eta[0], v.eta[1]));
  }

  void chart_nulls(const Point& p, int slot0, const Tangent& zero,
                   std::vector<Tangent>& out) const override {
    // Null directions of the chart k -> k E k^-1 are the centralizer of f,
    // i.e. Ad_k of the kernel of Ad_E - Id.
    const Mat& k = std::get<Mat>(p.slots[slot0]);
    const int dim = group_->dim();
    const Eigen::MatrixXd ad =
        group_->adjoint_matrix(embed_) - Eigen::MatrixXd::Identity(dim, dim);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    for (int i = 0; i < dim; ++i) {
      if (sv[i] > 1e-7) continue;
      const Mat zeta = group_->algebra_from_coords(svd.matrixV().col(i));
      Tangent t = zero;
      t.slots[slot0] = conj_by(k, zeta);
      out.push_back(std::move(t));
    }
  }

  bool can_solve_moment() const override { return true; }

  void solve_moment(const Mat& target, Rng&, Point& p,
                    int slot0) const override {
    auto [tau_t, k] = group_->alcove_decompose(target);
    if ((tau_t.lambda - tau_.lambda).lpNorm<Eigen::Infinity>() > 1e-9)
      fail(ErrorCode::kInfeasible,
           "conjugacy class cannot absorb a target with different eigenphases");
    p.slots[slot0] = k;
  }

 private:
  AlcoveParameter tau_;
  Mat embed_;
};

// ---------------------------------------------------------------------------

class DoubleSpace final : public Space {
 public:
  explicit DoubleSpace(const SuGroup* g)
      : Space("D", g, {SlotDesc{SlotKind::kGroup, 0}, SlotDesc{SlotKind::kGroup, 0}},
              2) {}

  void sample(Rng& rng, Point& p, int slot0) const override {
    p.slots[slot0] = group_->random_group(rng);
    p.slots[slot0 + 1] = group_->random_group(rng);
  }

  void moment(const Point& p, int slot0, Mat* out) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    out[0] = a * b;
    out[1] = a.adjoint() * b.adjoint();
  }

  void act(const Mat* g, const Point& p, int slot0, Point& out) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    out.slots[slot0] = (g[0] * a * g[1].adjoint()).eval();
    out.slots[slot0 + 1] = (g[1] * b * g[0].adjoint()).eval();
  }

  void push(const Mat* g, const Point&, int slot0, const Tangent& t,
            Tangent& out) const override {
    out.slots[slot0] = conj_by(g[0], std::get<Mat>(t.slots[slot0]));
    out.slots[slot0 + 1] = conj_by(g[1], std::get<Mat>(t.slots[slot0 + 1]));
  }

  void inf_action(const Mat* zeta, const Point& p, int slot0,
                  Tangent& out) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    out.slots[slot0] = (zeta[0] - conj_by(a, zeta[1])).eval();
    out.slots[slot0 + 1] = (zeta[1] - conj_by(b, zeta[0])).eval();
  }

  Prepared prepare(const Point& p, int slot0, const Tangent& t) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    const Mat& ea = std::get<Mat>(t.slots[slot0]);
    const Mat& eb = std::get<Mat>(t.slots[slot0 + 1]);
    Prepared out;
    out.eta.push_back(ea);
    out.eta.push_back(eb);
    out.eta.push_back(conj_inv(a, ea));  // a^* theta
    out.eta.push_back(conj_inv(b, eb));  // b^* theta
    const Mat mu1 = a * b;
    const Mat mu2 = a.adjoint() * b.adjoint();
    out.theta.push_back(conj_inv(mu1, ea) + conj_inv(b, eb));
    out.theta.push_back(-conj_by(b, ea) - eb);
    out.theta_bar.push_back(conj_by(mu1, out.theta[0]));
    out.theta_bar.push_back(conj_by(mu2, out.theta[1]));
    return out;
  }

  double form(const Point&, int, const Prepared& u,
              const Prepared& v) const override {
    // Omega_D = 1/2 (a^* theta, b^* theta_bar) + 1/2 (a^* theta_bar, b^* theta)
    return 0.5 * (group_->pairing(u.eta[2], v.eta[1]) -
                  group_->pairing(v.eta[2], u.eta[1])) +
           0.5 * (group_->pairing(u.eta[0], v.eta[3]) -
                  group_->pairing(v.eta[0], u.eta[3]));
  }
};

// ---------------------------------------------------------------------------

class FusedDoubleSpace final : public Space {
 public:
  explicit FusedDoubleSpace(const SuGroup* g)
      : Space("DD", g,
              {SlotDesc{SlotKind::kGroup, 0}, SlotDesc{SlotKind::kGroup, 0}}, 1) {}

  void sample(Rng& rng, Point& p, int slot0) const override {
    p.slots[slot0] = group_->random_group(rng);
    p.slots[slot0 + 1] = group_->random_group(rng);
  }

  void moment(const Point& p, int slot0, Mat* out) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    out[0] = a * b * a.adjoint() * b.adjoint();
  }

  void act(const Mat* g, const Point& p, int slot0, Point& out) const override {
    out.slots[slot0] = conj_by(g[0], std::get<Mat>(p.slots[slot0]));
    out.slots[slot0 + 1] = conj_by(g[0], std::get<Mat>(p.slots[slot0 + 1]));
  }

  void push(const Mat* g, const Point&, int slot0, const Tangent& t,
            Tangent& out) const override {
    out.slots[slot0] = conj_by(g[0], std::get<Mat>(t.slots[slot0]));
    out.slots[slot0 + 1] = conj_by(g[0], std::get<Mat>(t.slots[slot0 + 1]));
  }

  void inf_action(const Mat* zeta, const Point& p, int slot0,
                  Tangent& out) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    out.slots[slot0] = (zeta[0] - conj_by(a, zeta[0])).eval();
    out.slots[slot0 + 1] = (zeta[0] - conj_by(b, zeta[0])).eval();
  }

  Prepared prepare(const Point& p, int slot0, const Tangent& t) const override {
    const Mat& a = std::get<Mat>(p.slots[slot0]);
    const Mat& b = std::get<Mat>(p.slots[slot0 + 1]);
    const Mat& ea = std::get<Mat>(t.slots[slot0]);
    const Mat& eb = std::get<Mat>(t.slots[slot0 + 1]);
    const Mat mu1 = a * b;
    const Mat mu2 = a.adjoint() * b.adjoint();
    const Mat th1 = conj_inv(mu1, ea) + conj_inv(b, eb);   // (ab)^* theta
    const Mat th2 = -conj_by(b, ea) - eb;                  // (a^-1 b^-1)^* theta
    Prepared out;
    out.eta.push_back(ea);
    out.eta.push_back(eb);
    out.eta.push_back(conj_inv(a, ea));       // a^* theta
    out.eta.push_back(conj_inv(b, eb));       // b^* theta
    out.eta.push_back(th1);                   // (ab)^* theta
    out.eta.push_back(conj_by(mu2, th2));     // (a^-1 b^-1)^* theta_bar
    out.theta.push_back(conj_inv(mu2, th1) + th2);
    const Mat mu = mu1 * mu2;
    out.theta_bar.push_back(conj_by(mu, out.theta[0]));
    return out;
  }

  double form(const Point&, int, const Prepared& u,
              const Prepared& v) const override {
    return 0.5 * (group_->pairing(u.eta[2], v.eta[1]) -
                  group_->pairing(v.eta[2], u.eta[1])) +
           0.5 * (group_->pairing(u.eta[0], v.eta[3]) -
                  group_->pairing(v.eta[0], u.eta[3])) +
           0.5 * (group_->pairing(u.eta[4], v.eta[5]) -
                  group_->pairing(v.eta[4], u.eta[5]));
  }

  bool can_solve_moment() const override { return true; }

  void solve_moment(const Mat& target, Rng& rng, Point& p,
                    int slot0) const override {
    const int n = group_->n();
    if ((target - group_->identity()).norm() < 1e-9) {
      // Generic commuting pair: b in the centralizer torus of a Haar a.
      const Mat a = group_->random_group(rng);
      Eigen::ComplexSchur<Mat> schur(a, true);
      Vec phases(n);
      for (int j = 0; j < n; ++j) phases[j] = rng.uniform(-0.4, 0.4);
      phases.array() -= phases.sum() / n;
      Mat d = Mat::Zero(n, n);
      for (int j = 0; j < n; ++j) d(j, j) = std::exp(cd(0, phases[j]));
      p.slots[slot0] = a;
      p.slots[slot0 + 1] =
          (schur.matrixU() * d * schur.matrixU().adjoint()).eval();
      return;
    }
    // Clock-and-shift pair: [diag(d), shift] realizes any diagonal of unit
    // determinant, conjugate the pair onto the target's eigenbasis.
    auto [tau_t, k] = group_->alcove_decompose(target);
    Eigen::VectorXcd t(n), d(n);
    for (int j = 0; j < n; ++j) t[j] = std::exp(cd(0, kTwoPi * tau_t.lambda[j]));
    d[0] = cd(1, 0);
    for (int j = 0; j + 1 < n; ++j) d[j + 1] = d[j] * std::conj(t[j]);
    cd det(1, 0);
    for (int j = 0; j < n; ++j) det *= d[j];
    const double phase = std::atan2(det.imag(), det.real());
    const cd fix = std::exp(cd(0, -phase / n));
    Mat a = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) a(j, j) = d[j] * fix;
    Mat b = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j) b(j, (j + 1) % n) = 1.0;
    if (n % 2 == 0) b(0, 1) = -1.0;  // determinant of the n-cycle
    p.slots[slot0] = (k * a * k.adjoint()).eval();
    p.slots[slot0 + 1] = (k * b * k.adjoint()).eval();
  }
};

// ---------------------------------------------------------------------------

class InvertedSpace final : public Space {
 public:
  explicit InvertedSpace(SpacePtr child)
      : Space(child->name() + "-", &child->group(), child->slots(),
              child->num_factors()),
        child_(std::move(child)) {}

  void sample(Rng& rng, Point& p, int slot0) const override {
    child_->sample(rng, p, slot0);
  }

  void moment(const Point& p, int slot0, Mat* out) const override {
    child_->moment(p, slot0, out);
    for (int i = 0; i < n_factors_; ++i) out[i] = out[i].adjoint().eval();
  }

  void act(const Mat* g, const Point& p, int slot0, Point& out) const override {
    child_->act(g, p, slot0, out);
  }

  void push(const Mat* g, const Point& p, int slot0, const Tangent& t,
            Tangent& out) const override {
    child_->push(g, p, slot0, t, out);
  }

  void inf_action(const Mat* zeta, const Point& p, int slot0,
                  Tangent& out) const override {
    child_->inf_action(zeta, p, slot0, out);
  }

  Prepared prepare(const Point& p, int slot0, const Tangent& t) const override {
    Prepared inner = child_->prepare(p, slot0, t);
    Prepared out;
    out.theta.reserve(n_factors_);
    out.theta_bar.reserve(n_factors_);
    for (int i = 0; i < n_factors_; ++i) {
      out.theta.push_back(-inner.theta_bar[i]);
      out.theta_bar.push_back(-inner.theta[i]);
    }
    out.children.push_back(std::move(inner));
    return out;
  }

  double form(const Point& p, int slot0, const Prepared& u,
              const Prepared& v) const override {
    return -child_->form(p, slot0, u.children[0], v.children[0]);
  }

  void chart_nulls(const Point& p, int slot0, const Tangent& zero,
                   std::vector<Tangent>& out) const override {
    child_->chart_nulls(p, slot0, zero, out);
  }

  bool can_solve_moment() const override { return child_->can_solve_moment(); }

  void solve_moment(const Mat& target, Rng& rng, Point& p,
                    int slot0) const override {
    child_->solve_moment(target.adjoint(), rng, p, slot0);
  }

 private:
  SpacePtr child_;
};

// ---------------------------------------------------------------------------

std::vector<SlotDesc> concat_slots(const SpacePtr& a, const SpacePtr& b) {
  std::vector<SlotDesc> s = a->slots();
  s.insert(s.end(), b->slots().begin(), b->slots().end());
  return s;
}

class FusedSpace final : public Space {
 public:
  FusedSpace(SpacePtr m1, SpacePtr m2, int f1, int f2)
      : Space(m1->name() + "*" + m2->name(), &m1->group(), concat_slots(m1, m2),
              m1->num_factors() + m2->num_factors() - 1),
        c1_(std::move(m1)),
        c2_(std::move(m2)),
        f1_(f1),
        f2_(f2) {
    if (&c1_->group() != &c2_->group())
      fail(ErrorCode::kDimensionMismatch, "fuse: structure group mismatch");
    if (f1_ < 0 || f1_ >= c1_->num_factors() || f2_ < 0 ||
        f2_ >= c2_->num_factors())
      fail(ErrorCode::kBadConfig, "fuse: factor index out of range");
  }

  void sample(Rng& rng, Point& p, int slot0) const override {
    c1_->sample(rng, p, slot0);
    c2_->sample(rng, p, slot0 + c1_->num_slots());
  }

  void moment(const Point& p, int slot0, Mat* out) const override {
    std::vector<Mat> m1(c1_->num_factors()), m2(c2_->num_factors());
    c1_->moment(p, slot0, m1.data());
    c2_->moment(p, slot0 + c1_->num_slots(), m2.data());
    out[0] = m1[f1_] * m2[f2_];
    int at = 1;
    for (int i = 0; i < c1_->num_factors(); ++i)
      if (i != f1_) out[at++] = m1[i];
    for (int i = 0; i < c2_->num_factors(); ++i)
      if (i != f2_) out[at++] = m2[i];
  }

  void act(const Mat* g, const Point& p, int slot0, Point& out) const override {
    std::vector<Mat> g1, g2;
    distribute(g, g1, g2);
    c1_->act(g1.data(), p, slot0, out);
    c2_->act(g2.data(), p, slot0 + c1_->num_slots(), out);
  }

  void push(const Mat* g, const Point& p, int slot0, const Tangent& t,
            Tangent& out) const override {
    std::vector<Mat> g1, g2;
    distribute(g, g1, g2);
    c1_->push(g1.data(), p, slot0, t, out);
    c2_->push(g2.data(), p, slot0 + c1_->num_slots(), t, out);
  }

  void inf_action(const Mat* zeta, const Point& p, int slot0,
                  Tangent& out) const override {
    std::vector<Mat> z1, z2;
    distribute(zeta, z1, z2);
    c1_->inf_action(z1.data(), p, slot0, out);
    c2_->inf_action(z2.data(), p, slot0 + c1_->num_slots(), out);
  }

  Prepared prepare(const Point& p, int slot0, const Tangent& t) const override {
    Prepared p1 = c1_->prepare(p, slot0, t);
    Prepared p2 = c2_->prepare(p, slot0 + c1_->num_slots(), t);
    std::vector<Mat> m1(c1_->num_factors()), m2(c2_->num_factors());
    c1_->moment(p, slot0, m1.data());
    c2_->moment(p, slot0 + c1_->num_slots(), m2.data());
    Prepared out;
    out.theta.push_back(conj_inv(m2[f2_], p1.theta[f1_]) + p2.theta[f2_]);
    out.theta_bar.push_back(p1.theta_bar[f1_] +
                            conj_by(m1[f1_], p2.theta_bar[f2_]));
    for (int i = 0; i < c1_->num_factors(); ++i) {
      if (i == f1_) continue;
      out.theta.push_back(p1.theta[i]);
      out.theta_bar.push_back(p1.theta_bar[i]);
    }
    for (int i = 0; i < c2_->num_factors(); ++i) {
      if (i == f2_) continue;
      out.theta.push_back(p2.theta[i]);
      out.theta_bar.push_back(p2.theta_bar[i]);
    }
    out.children.push_back(std::move(p1));
    out.children.push_back(std::move(p2));
    return out;
  }

  double form(const Point& p, int slot0, const Prepared& u,
              const Prepared& v) const override {
    const double cross =
        0.5 * (group_->pairing(u.children[0].theta[f1_],
                               v.children[1].theta_bar[f2_]) -
               group_->pairing(v.children[0].theta[f1_],
                               u.children[1].theta_bar[f2_]));
    return c1_->form(p, slot0, u.children[0], v.children[0]) +
           c2_->form(p, slot0 + c1_->num_slots(), u.children[1],
                     v.children[1]) +
           cross;
  }

  void chart_nulls(const Point& p, int slot0, const Tangent& zero,
                   std::vector<Tangent>& out) const override {
    c1_->chart_nulls(p, slot0, zero, out);
    c2_->chart_nulls(p, slot0 + c1_->num_slots(), zero, out);
  }

 private:
  void distribute(const Mat* g, std::vector<Mat>& g1,
                  std::vector<Mat>& g2) const {
    g1.resize(c1_->num_factors());
    g2.resize(c2_->num_factors());
    int at = 1;
    for (int i = 0; i < c1_->num_factors(); ++i)
      g1[i] = (i == f1_) ? g[0] : g[at++];
    for (int i = 0; i < c2_->num_factors(); ++i)
      g2[i] = (i == f2_) ? g[0] : g[at++];
  }

  SpacePtr c1_, c2_;
  int f1_, f2_;
};

}  // namespace

SpacePtr conjugacy_class(const SuGroup* g, const AlcoveParameter& tau) {
  return std::make_shared<ConjugacyClassSpace>(g, tau);
}

SpacePtr double_space(const SuGroup* g) {
  return std::make_shared<DoubleSpace>(g);
}

SpacePtr fused_double(const SuGroup* g) {
  return std::make_shared<FusedDoubleSpace>(g);
}

SpacePtr invert(SpacePtr m) { return std::make_shared<InvertedSpace>(std::move(m)); }

SpacePtr fuse(SpacePtr m1, SpacePtr m2, int f1, int f2) {
  return std::make_shared<FusedSpace>(std::move(m1), std::move(m2), f1, f2);
}

SpacePtr fuse_many(const std::vector<SpacePtr>& factors) {
  if (factors.empty()) fail(ErrorCode::kBadConfig, "fuse_many: empty recipe");
  SpacePtr acc = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) acc = fuse(acc, factors[i], 0, 0);
  return acc;
}

double class_form_at(const SuGroup& g, const Mat& f, const Mat& xi,
                     const Mat& eta) {
  return 0.5 * (g.pairing(eta, f * xi * f.adjoint()) -
                g.pairing(xi, f * eta * f.adjoint()));
}

double class_form_chart(const SuGroup& g, const Mat& e_embed,
                        const Mat& xi_left_u, const Mat& xi_left_v) {
  const Mat ad = e_embed.adjoint() * xi_left_v * e_embed;
  const Mat ad_u = e_embed.adjoint() * xi_left_u * e_embed;
  return 0.5 * (g.pairing(xi_left_u, ad) - g.pairing(xi_left_v, ad_u));
}

}  // namespace qham
