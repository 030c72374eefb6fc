#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smms/geodesic.hpp"
#include "smms/geometry.hpp"

namespace smms {

struct TransportOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  // A surface transport is focal once A <= focal_det or |m| >= focal_m; a
  // point transport once det J / t^{n-1} <= focal_det.
  double focal_det = 1e-10;
  double focal_m = 1e10;
};

// Start of a normal geodesic on a hypersurface: the point, the outward unit
// normal, a g-orthonormal tangent frame (n x (n-1)) and the shape operator
// in that frame.
struct TransportStart {
  ChartPoint x;
  Vec normal;
  Mat frame;
  Mat shape;
};

// Weighted volume element along exp_x(r nu). Entries exist only for grid radii
// before the focal time.
struct RadialTransport {
  std::vector<double> r;
  std::vector<Mat> shape;
  std::vector<double> m, m_f, A, A_f, theta;
  // Integral of A_f from 0 to r.
  std::vector<double> volume;
  std::optional<double> focal_r;
  // Integral of A_f up to min(r_max, focal_r).
  double total_volume = 0.0;
  double k = 0.0;
  double H_f = 0.0;
  double f_at = 0.0;
  double df_dr_min = 0.0;  // minimum of df/dr over the grid
  GeodesicPath geodesic;

  std::size_t size() const { return r.size(); }
};

RadialTransport radial_transport(const Smms& smms, const TransportStart& start, std::span<const double> r_grid,
                                 const TransportOptions& opts = {});
// Uniform grid of `points` radii on [0, r_max].
RadialTransport radial_transport(const Smms& smms, const TransportStart& start, double r_max, int points = 1001,
                                 const TransportOptions& opts = {});

// Ray from a base point: the Jacobi fields vanish at t = 0 (or are seeded at
// t = eps when the base is the pole of a polar chart).
struct RayStart {
  ChartPoint x;   // chart position where integration begins
  Vec direction;  // g-unit
  double t0 = 0.0;
  double f_base = 0.0;  // f at the base point, used for the seed head term
};

struct RayResult {
  // Integral of e^{-f} det J from 0 to min(stop, focal) for every stop radius.
  std::vector<double> volume;
  std::optional<double> focal_r;
  // When a level function was given: first time with level >= 0 and the
  // integral up to it.
  std::optional<double> exit_t;
  double exit_volume = 0.0;
  double df_dr_min = std::numeric_limits<double>::infinity();
};

using LevelFunction = std::function<double(const ChartPoint&)>;

RayStart ray_from_base(const Smms& smms, const BasePoint& base, const Vec& unit_direction,
                       std::span<const double> angles,
                       double eps_seed = 1e-4);

RayResult point_ray(const Smms& smms, const RayStart& start, std::span<const double> stops,
                    const LevelFunction* level = nullptr, const TransportOptions& opts = {});

}  // namespace smms
