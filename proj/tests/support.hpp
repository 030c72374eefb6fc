#pragma once
// Shared fixtures for the test binaries: hand-written metrics that do not go
// through the model catalog, and finite-difference helpers.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "smms/geometry.hpp"

namespace smms::testing {

inline constexpr double kPi = std::numbers::pi;

inline MetricField flat_metric(int n) {
  return MetricField(n, ChartDomain::whole(n), [n](std::span<const Jet>, std::span<Jet> up) {
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) up[p++] = Jet(i == j ? 1.0 : 0.0);
  });
}

// dr^2 + r^2 dtheta^2 on r > 0.
inline MetricField polar_plane() {
  ChartDomain d{{{0.0, std::numeric_limits<double>::infinity(), false}, {0.0, 2 * kPi, true}}};
  return MetricField(2, d, [](std::span<const Jet> u, std::span<Jet> up) {
    up[0] = Jet(1.0);
    up[1] = Jet(0.0);
    up[2] = u[0] * u[0];
  });
}

// Round unit S^2 in (theta, phi): dtheta^2 + sin^2(theta) dphi^2.
inline MetricField round_s2(double radius = 1.0) {
  ChartDomain d{{{0.0, kPi, false}, {0.0, 2 * kPi, true}}};
  return MetricField(2, d, [radius](std::span<const Jet> u, std::span<Jet> up) {
    const Jet s = sin(u[0]);
    up[0] = Jet(radius * radius);
    up[1] = Jet(0.0);
    up[2] = radius * radius * s * s;
  });
}

// Round unit S^3 in hyperspherical angles (chi, theta, phi).
inline MetricField round_s3() {
  ChartDomain d{{{0.0, kPi, false}, {0.0, kPi, false}, {0.0, 2 * kPi, true}}};
  return MetricField(3, d, [](std::span<const Jet> u, std::span<Jet> up) {
    const Jet s = sin(u[0]), t = sin(u[1]);
    for (auto& c : up) c = Jet(0.0);
    up[0] = Jet(1.0);
    up[3] = s * s;
    up[5] = s * s * t * t;
  });
}

// Warped dr^2 + w(r)^2 g_{S^{n-1}} written out for n = 3.
inline MetricField warped3(std::function<Jet(const Jet&)> w) {
  ChartDomain d{{{0.0, std::numeric_limits<double>::infinity(), false}, {0.0, kPi, false}, {0.0, 2 * kPi, true}}};
  return MetricField(3, d, [w](std::span<const Jet> u, std::span<Jet> up) {
    const Jet ww = w(u[0]);
    const Jet t = sin(u[1]);
    for (auto& c : up) c = Jet(0.0);
    up[0] = Jet(1.0);
    up[3] = ww * ww;
    up[5] = ww * ww * t * t;
  });
}

// Fourth-order central stencils. A correct derivative shows an observed
// order near 4; a wrong one plateaus at order 0.
inline double central_d1(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}
inline double central_d2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

// Observed order of the stencil error against an exact value:
// log2(err(h) / err(h/2)). Returns +inf when both errors are at rounding level.
inline double observed_order(const std::function<double(double)>& f, double x, double exact, double h = 5e-2) {
  auto err = [&](double hh) { return std::abs(central_d1(f, x, hh) - exact); };
  const double e1 = err(h), e2 = err(0.5 * h);
  if (e1 < 1e-11 && e2 < 1e-11) return std::numeric_limits<double>::infinity();
  return std::log2(e1 / e2);
}

}  // namespace smms::testing
