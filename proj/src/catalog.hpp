#pragma once

#include "qham_space.hpp"

namespace qham {

/// Conjugacy class through exp(2 pi i diag(tau)), chart k in G with
/// f = k exp(2 pi i tau) k^-1, G acting by k -> g k, moment the embedding.
SpacePtr conjugacy_class(const SuGroup* g, const AlcoveParameter& tau);

/// The double D(G): pairs (a, b) with the G x G action
/// (g1, g2) . (a, b) = (g1 a g2^-1, g2 b g1^-1) and moments (ab, a^-1 b^-1).
SpacePtr double_space(const SuGroup* g);

/// The internally fused double: pairs (a, b), diagonal conjugation, moment
/// the group commutator a b a^-1 b^-1.
SpacePtr fused_double(const SuGroup* g);

/// Same action, negated form, inverted moment components.
SpacePtr invert(SpacePtr m);

/// Fusion product merging factor f1 of m1 with factor f2 of m2 into one
/// diagonal factor (which becomes factor 0 of the result); the remaining
/// factors keep their order.  Form picks up the cross term
/// 1/2 (mu_1^* theta, mu_2^* theta_bar).
SpacePtr fuse(SpacePtr m1, SpacePtr m2, int f1 = 0, int f2 = 0);

/// Left-associated iterated fusion of the designated (default first)
/// factors.
SpacePtr fuse_many(const std::vector<SpacePtr>& factors);

/// Evaluator of the conjugacy-class 2-form at a group element f on
/// infinitesimal-action labels xi, eta; used by hand-coded oracles.
double class_form_at(const SuGroup& g, const Mat& f, const Mat& xi,
                     const Mat& eta);

/// The other presentation of the class form, through the chart
/// f = k exp(2 pi i tau) k^-1 with left coordinates k^-1 dk.
double class_form_chart(const SuGroup& g, const Mat& e_embed, const Mat& xi_left_u,
                        const Mat& xi_left_v);

}  // namespace qham
