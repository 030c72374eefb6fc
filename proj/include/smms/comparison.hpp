#pragma once

#include <string>
#include <vector>

#include "smms/transport.hpp"

namespace smms {

struct Witness {
  ChartPoint x;
  double r = 0.0;
  std::size_t index = 0;
};

// Supremum of a signed violation over a finite sample set; <= 0 means the
// sampled inequality holds exactly.
struct ComparisonVerdict {
  std::string quantity;
  double max_violation = 0.0;
  Witness witness;
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::vector<std::string> hypothesis_flags;

  bool holds() const { return max_violation <= tolerance; }
};

// (k-1) H_f / (k-1 + H_f r). Throws when the denominator is not positive.
double model_mean_curvature(double H_f, double k, double r);
// (n-1) + H_f r
double auxiliary_h(double H_f, int n, double r);

// max over the grid of m_f(r) - m0(r).
ComparisonVerdict compare_mean_curvature(const RadialTransport& transport, double H_f, double k, double tol);
// Largest forward difference of theta.
ComparisonVerdict check_theta_monotone(const RadialTransport& transport, double tol);
// max over the grid of (A_f - e^{-f(x)} (1 + H_f r/(k-1))^{k-1}) / max(1, bound).
ComparisonVerdict check_volume_element_bound(const RadialTransport& transport, double H_f, double k, double f_at,
                                             double tol);

// lhs - |S^{k-1}| avr
double willmore_gap(double lhs, double avr, double k);
// sqrt((n+N-1)/(n-1)) pi / sqrt(H)
double myers_diameter_bound(int n, double N, double H);

}  // namespace smms
