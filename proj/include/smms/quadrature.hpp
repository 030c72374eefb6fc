#pragma once

#include <vector>

namespace smms {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` nodes mapped to [lo, hi].
Rule1D gauss_legendre(int order, double lo, double hi);

// Midpoint rule on a periodic interval: nodes at (j + 1/2) h, never on the seam.
Rule1D periodic_rule(int order, double lo, double hi);

// |S^{k-1}| = 2 pi^{k/2} / Gamma(k/2), valid for real k > 0.
double unit_sphere_area(double k);
// omega_k = pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(double k);

}  // namespace smms
