#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smms/geometry.hpp"
#include "smms/transport.hpp"

namespace smms {

// Parametrized closed hypersurface (or a patch of one, for plane and
// cylinder test surfaces) in the chart of an n-dimensional model.
struct Embedding {
  using Map = std::function<void(std::span<const Jet> u, std::span<Jet> x)>;
  using Hint = std::function<Vec(const ChartPoint& x)>;

  std::string kind;
  int ambient_dim = 0;
  std::vector<Interval> param_axes;  // n - 1 axes
  std::vector<int> orders;           // quadrature nodes per axis
  Map map;
  // Chart vector pointing away from the enclosed region; only its sign
  // against the normal is used.
  Hint outward;
  // Negative inside the enclosed region, positive outside. Empty for patches.
  LevelFunction level;
  bool flipped = false;

  int param_dim() const { return static_cast<int>(param_axes.size()); }
  ChartPoint point(const Vec& u) const;
  Embedding with_orders(std::vector<int> new_orders) const;
  Embedding flip() const;
};

struct ShapeData {
  Vec u;
  ChartPoint x;
  Vec normal;   // g-unit, chart components
  Mat frame;    // g-orthonormal tangent frame, n x (n-1)
  Mat shape;    // shape operator in `frame`
  double H = 0.0;
  double H_f = 0.0;
  double f_at = 0.0;
  double area_weight = 0.0;  // sqrt(det g_Sigma) in the parameters

  TransportStart transport_start() const { return {x, normal, frame, shape}; }
};

// Sphere of radius rho about `center` in a Cartesian chart. `rotation` turns
// the parametrization (the image is the same set).
Embedding sphere_embedding(int n, double rho, const Vec& center, int colatitude_order = 24,
                           int azimuth_order = 48, const Mat& rotation = Mat());
Embedding ellipsoid_embedding(int n, const Vec& semi_axes, const Vec& center, const Mat& rotation,
                              int colatitude_order = 32, int azimuth_order = 64);
// Level set {r = rho} of a polar chart (r, angles).
Embedding polar_sphere_embedding(int n, double rho, int colatitude_order = 24, int azimuth_order = 48);
// Cylinder of radius rho about the x3 axis in R^3, |x3| < half_length.
Embedding cylinder_embedding(double rho, double half_length = 1.0);
// Plane x_n = height, patch |x_i| < half_width.
Embedding plane_embedding(int n, double height = 0.0, double half_width = 1.0);

ShapeData shape_operator(const Embedding& emb, const MetricField& metric, const Vec& u);
ShapeData shape_data(const Embedding& emb, const Smms& smms, const Vec& u);

struct WeightedMeanCurvature {
  double H = 0.0;
  double H_f = 0.0;
};
WeightedMeanCurvature weighted_mean_curvature(const Embedding& emb, const Smms& smms, const Vec& u);

// Tensor-product nodes: Gauss-Legendre on bounded axes, midpoint on periodic
// axes. Weights are the plain parameter weights (no area factor).
struct SurfaceNodes {
  std::vector<Vec> params;
  std::vector<double> weights;
};
SurfaceNodes surface_nodes(const Embedding& emb);

struct Integral {
  double value = 0.0;
  double error = 0.0;  // |I(orders) - I(orders / 2)|, floored at rounding level
  std::size_t nodes = 0;
};

using SurfaceIntegrand = std::function<double(const ShapeData&)>;

Integral surface_integrate(const Embedding& emb, const Smms& smms, const SurfaceIntegrand& integrand);
Integral surface_integrate(const Embedding& emb, const MetricField& metric, const SurfaceIntegrand& integrand);

enum class IntegrandMode { absolute, positive_part, plain_power };
std::string mode_name(IntegrandMode mode);
IntegrandMode parse_mode(const std::string& name);
// absolute for finite N, plain_power for N = inf.
IntegrandMode default_mode(const Weight& weight);

struct WillmoreLhs {
  IntegrandMode mode = IntegrandMode::absolute;
  double value = 0.0;
  double error = 0.0;
  double k = 0.0;
  double min_H_f = 0.0;
  std::size_t nodes = 0;
  std::vector<std::string> warnings;
};

// Integral over the surface of |H_f/(k-1)|^{k-1} e^{-f} (or the positive part,
// or the signed power). When `k` is given it must agree with the space.
WillmoreLhs willmore_lhs(const Embedding& emb, const Smms& smms, IntegrandMode mode,
                         std::optional<double> k = std::nullopt);

}  // namespace smms
