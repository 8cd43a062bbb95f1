#include <cstdio>

#include "axiom_check.hpp"
#include "loop_space.hpp"
#include "su_group.hpp"

using namespace qham;

int main() {
  SuGroup g(2);
  for (int n : {64, 128, 256, 512}) {
    Rng rng(62);
    const Mat x = g.random_algebra(rng);
    const Mat y = g.random_algebra(rng);
    const Mat z = g.random_algebra(rng);
    std::vector<Mat> jl(n), gf(n);
    for (int j = 0; j < n; ++j) {
      const double s = kTwoPi * j / n;
      jl[j] = 0.5 * std::cos(s) * x + 0.3 * std::sin(s) * y + 0.2 * z;
      gf[j] = g.group_exp(std::sin(s) * y + 0.4 * (1 - std::cos(s)) * z);
    }
    const Factorization f = factorize_wznw(g, jl, gf);
    const double ds = kTwoPi / n;
    double hl_direct = 0, hr_direct = 0;
    for (int j = 0; j < n; ++j) {
      hl_direct += -0.5 * g.pairing(jl[j], jl[j]) * ds;
      hr_direct += -0.5 * g.pairing(f.j_right[j], f.j_right[j]) * ds;
    }
    const double hl_fit = loop_hamiltonian(g, f.l, true);
    const double hr_fit = loop_hamiltonian(g, f.g_r, true);
    printf("n=%4d  Hl: direct=%.8f fit=%.8f gap=%.2e   Hr: direct=%.8f fit=%.8f gap=%.2e\n",
           n, hl_direct, hl_fit, std::abs(hl_direct - hl_fit), hr_direct,
           hr_fit, std::abs(hr_direct - hr_fit));

    // Check the fitted g_r chart reproduces the holonomy nodes.
    const std::vector<Mat> gr = holonomy(g, f.j_right);
    double node_gap = 0;
    for (int j = 0; j < n; ++j)
      node_gap = std::max(node_gap, (loop_value(f.g_r, j) - gr[j]).norm());
    printf("        g_r node reproduction: %.2e\n", node_gap);
  }
  return 0;
}
