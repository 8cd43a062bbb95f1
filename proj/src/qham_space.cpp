#include "qham_space.hpp"

#include <cmath>

#include "errors.hpp"

namespace qham {

void Space::solve_moment(const Mat&, Rng&, Point&, int) const {
  fail(ErrorCode::kInfeasible,
       name_ + ": moment equation not solvable for this space");
}

Point sample_point(const Space& s, Rng& rng) {
  Point p;
  p.slots.resize(s.num_slots());
  s.sample(rng, p, 0);
  return p;
}

std::vector<Mat> moment_of(const Space& s, const Point& p) {
  std::vector<Mat> out(s.num_factors());
  s.moment(p, 0, out.data());
  return out;
}

Point act_on(const Space& s, const std::vector<Mat>& g, const Point& p) {
  if (static_cast<int>(g.size()) != s.num_factors())
    fail(ErrorCode::kDimensionMismatch, "act: one group element per factor");
  Point out = p;
  s.act(g.data(), p, 0, out);
  return out;
}

Tangent push_tangent(const Space& s, const std::vector<Mat>& g, const Point& p,
                     const Tangent& t) {
  Tangent out = t;
  s.push(g.data(), p, 0, t, out);
  return out;
}

Tangent infinitesimal_action(const Space& s, const std::vector<Mat>& zeta,
                             const Point& p) {
  Tangent out = zero_tangent(s);
  s.inf_action(zeta.data(), p, 0, out);
  return out;
}

double eval_form(const Space& s, const Point& p, const Tangent& u,
                 const Tangent& v) {
  const Prepared pu = s.prepare(p, 0, u);
  const Prepared pv = s.prepare(p, 0, v);
  return s.form(p, 0, pu, pv);
}

int tangent_dim(const Space& s) {
  const int d = s.group().dim();
  const int n = s.group().n();
  int total = 0;
  for (const SlotDesc& sd : s.slots()) {
    if (sd.kind == SlotKind::kGroup)
      total += d;
    else
      total += sd.grid * d + (n - 1) + d;
  }
  return total;
}

Tangent zero_tangent(const Space& s) {
  const SuGroup& g = s.group();
  Tangent t;
  t.slots.reserve(s.num_slots());
  const Mat z = Mat::Zero(g.n(), g.n());
  for (const SlotDesc& sd : s.slots()) {
    if (sd.kind == SlotKind::kGroup) {
      t.slots.emplace_back(z);
    } else {
      LoopTangent lt;
      lt.eta.assign(sd.grid, z);
      lt.dlambda = Vec::Zero(g.n());
      lt.zeta0 = z;
      t.slots.emplace_back(std::move(lt));
    }
  }
  return t;
}

Vec alcove_direction_basis(int n, int m) {
  Vec v = Vec::Zero(n);
  const double c = 1.0 / std::sqrt(static_cast<double>(m + 1) * (m + 2));
  for (int j = 0; j <= m; ++j) v[j] = c;
  v[m + 1] = -(m + 1) * c;
  return v;
}

Vec tangent_to_coords(const Space& s, const Tangent& t) {
  const SuGroup& g = s.group();
  const int d = g.dim();
  const int n = g.n();
  Vec c(tangent_dim(s));
  int at = 0;
  for (int i = 0; i < s.num_slots(); ++i) {
    if (s.slots()[i].kind == SlotKind::kGroup) {
      c.segment(at, d) = g.algebra_coords(std::get<Mat>(t.slots[i]));
      at += d;
    } else {
      const LoopTangent& lt = std::get<LoopTangent>(t.slots[i]);
      for (const Mat& e : lt.eta) {
        c.segment(at, d) = g.algebra_coords(e);
        at += d;
      }
      for (int m = 0; m + 1 < n; ++m)
        c[at++] = alcove_direction_basis(n, m).dot(lt.dlambda);
      c.segment(at, d) = g.algebra_coords(lt.zeta0);
      at += d;
    }
  }
  return c;
}

Tangent tangent_from_coords(const Space& s, const Vec& c) {
  const SuGroup& g = s.group();
  const int d = g.dim();
  const int n = g.n();
  Tangent t = zero_tangent(s);
  int at = 0;
  for (int i = 0; i < s.num_slots(); ++i) {
    if (s.slots()[i].kind == SlotKind::kGroup) {
      t.slots[i] = g.algebra_from_coords(c.segment(at, d));
      at += d;
    } else {
      LoopTangent& lt = std::get<LoopTangent>(t.slots[i]);
      for (Mat& e : lt.eta) {
        e = g.algebra_from_coords(c.segment(at, d));
        at += d;
      }
      lt.dlambda = Vec::Zero(n);
      for (int m = 0; m + 1 < n; ++m)
        lt.dlambda += c[at++] * alcove_direction_basis(n, m);
      lt.zeta0 = g.algebra_from_coords(c.segment(at, d));
      at += d;
    }
  }
  return t;
}

Tangent random_tangent(const Space& s, Rng& rng) {
  const SuGroup& g = s.group();
  const int n = g.n();
  Tangent t = zero_tangent(s);
  for (int i = 0; i < s.num_slots(); ++i) {
    const SlotDesc& sd = s.slots()[i];
    if (sd.kind == SlotKind::kGroup) {
      t.slots[i] = g.random_algebra(rng);
    } else {
      LoopTangent& lt = std::get<LoopTangent>(t.slots[i]);
      constexpr int kModes = 3;
      std::vector<Mat> ac, bc;
      for (int m = 0; m <= kModes; ++m) {
        const double w = 1.0 / (1.0 + m * m);
        ac.push_back(w * g.random_algebra(rng));
        bc.push_back(w * g.random_algebra(rng));
      }
      for (int j = 0; j < sd.grid; ++j) {
        const double sigma = kTwoPi * j / sd.grid;
        Mat e = Mat::Zero(n, n);
        for (int m = 0; m <= kModes; ++m)
          e += std::cos(m * sigma) * ac[m] + std::sin(m * sigma) * bc[m];
        lt.eta[j] = e;
      }
      Vec dl = Vec::Zero(n);
      for (int m = 0; m + 1 < n; ++m)
        dl += (0.5 * rng.gauss()) * alcove_direction_basis(n, m);
      lt.dlambda = dl;
      lt.zeta0 = g.random_algebra(rng);
    }
  }
  return t;
}

Point flow(const Space& s, const Point& p, const Tangent& t, double time) {
  const SuGroup& g = s.group();
  Point out = p;
  for (int i = 0; i < s.num_slots(); ++i) {
    if (s.slots()[i].kind == SlotKind::kGroup) {
      const Mat& eta = std::get<Mat>(t.slots[i]);
      out.slots[i] = g.group_exp(time * eta) * std::get<Mat>(p.slots[i]);
    } else {
      const LoopPoint& lp = std::get<LoopPoint>(p.slots[i]);
      const LoopTangent& lt = std::get<LoopTangent>(t.slots[i]);
      LoopPoint moved = lp;
      for (int j = 0; j < lp.nodes(); ++j)
        moved.h[j] = g.group_exp(time * lt.eta[j]) * lp.h[j];
      moved.lambda = lp.lambda + time * lt.dlambda;
      moved.g0 = g.group_exp(time * lt.zeta0) * lp.g0;
      out.slots[i] = std::move(moved);
    }
  }
  return out;
}

Tangent coordinate_bracket(const Space& s, const Tangent& u, const Tangent& v) {
  Tangent out = zero_tangent(s);
  for (int i = 0; i < s.num_slots(); ++i) {
    if (s.slots()[i].kind == SlotKind::kGroup) {
      out.slots[i] =
          SuGroup::bracket(std::get<Mat>(u.slots[i]), std::get<Mat>(v.slots[i]));
    } else {
      const LoopTangent& lu = std::get<LoopTangent>(u.slots[i]);
      const LoopTangent& lv = std::get<LoopTangent>(v.slots[i]);
      LoopTangent& lo = std::get<LoopTangent>(out.slots[i]);
      for (size_t j = 0; j < lu.eta.size(); ++j)
        lo.eta[j] = SuGroup::bracket(lu.eta[j], lv.eta[j]);
      lo.zeta0 = SuGroup::bracket(lu.zeta0, lv.zeta0);
      // dlambda directions live in a vector space and commute.
    }
  }
  return out;
}

Tangent tangent_combo(const Space& s, double a, const Tangent& u, double b,
                      const Tangent& v) {
  Tangent out = zero_tangent(s);
  for (int i = 0; i < s.num_slots(); ++i) {
    if (s.slots()[i].kind == SlotKind::kGroup) {
      out.slots[i] = (a * std::get<Mat>(u.slots[i]) +
                      b * std::get<Mat>(v.slots[i]))
                         .eval();
    } else {
      const LoopTangent& lu = std::get<LoopTangent>(u.slots[i]);
      const LoopTangent& lv = std::get<LoopTangent>(v.slots[i]);
      LoopTangent& lo = std::get<LoopTangent>(out.slots[i]);
      for (size_t j = 0; j < lu.eta.size(); ++j)
        lo.eta[j] = a * lu.eta[j] + b * lv.eta[j];
      lo.dlambda = a * lu.dlambda + b * lv.dlambda;
      lo.zeta0 = a * lu.zeta0 + b * lv.zeta0;
    }
  }
  return out;
}

}  // namespace qham
