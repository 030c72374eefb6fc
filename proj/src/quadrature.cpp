#include "smms/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "smms/error.hpp"

namespace smms {

Rule1D gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  Rule1D rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged node.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order == 1 ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[order - 1 - i] = half * w;
  }
  return rule;
}

Rule1D periodic_rule(int order, double lo, double hi) {
  if (order < 1) throw DomainError("periodic_rule: order must be >= 1");
  Rule1D rule;
  const double h = (hi - lo) / order;
  for (int j = 0; j < order; ++j) {
    rule.nodes.push_back(lo + (j + 0.5) * h);
    rule.weights.push_back(h);
  }
  return rule;
}

double unit_sphere_area(double k) {
  if (!(k > 0.0)) throw DomainError("unit_sphere_area: k must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

double unit_ball_volume(double k) {
  if (!(k > 0.0)) throw DomainError("unit_ball_volume: k must be positive");
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

}  // namespace smms
