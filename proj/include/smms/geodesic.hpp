#pragma once

#include <string>
#include <vector>

#include "smms/geometry.hpp"

namespace smms {

struct GeodesicSample {
  double t = 0.0;
  ChartPoint position;
  Vec velocity;
  double speed = 0.0;  // |velocity|_g
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  // True when the path left the chart before r_max; samples stop there.
  bool exited_chart = false;
  double end_t = 0.0;
};

// Distance from u to the nearest non-periodic edge of the chart box.
double distance_to_boundary(const ChartDomain& domain, const ChartPoint& u);

// Unit-speed geodesic from x0 in direction v0, sampled at `sample_count`
// equally spaced times in [0, r_max]. Throws NumericalError when the step size
// underflows away from the chart boundary.
GeodesicPath integrate_geodesic(const MetricField& metric, const ChartPoint& x0, const Vec& v0, double r_max,
                                double tol = 1e-9, int sample_count = 101);

}  // namespace smms
