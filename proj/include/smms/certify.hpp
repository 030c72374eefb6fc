#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smms/hypersurface.hpp"

namespace smms {

// Where to look. Each check runs only when its inputs are present.
struct SamplePlan {
  std::vector<ChartPoint> points;  // ambient samples for the curvature check
  // Normal geodesics from the surface: nodes of the embedding at these orders.
  std::vector<int> surface_orders{4, 8};
  double normal_r_max = 5.0;
  int normal_points = 21;
  // Rays from the base point.
  int radial_colatitude_order = 4;
  int radial_azimuth_order = 8;
  double radial_r_max = 10.0;
  int radial_points = 21;
  double eps_seed = 1e-4;
  bool check_surface = true;
  bool check_radial = true;
  double tolerance = 1e-9;
};

struct CertifiedMinimum {
  std::string name;
  bool checked = false;
  bool required = false;
  double minimum = std::numeric_limits<double>::infinity();
  ChartPoint witness;
  double witness_r = std::nan("");
  std::size_t samples = 0;

  bool ok(double tol) const { return !checked || minimum >= -tol; }
};

struct CertificationReport {
  CertifiedMinimum bakry_emery;  // smallest generalized eigenvalue w.r.t. g
  CertifiedMinimum df_dr;        // along normal geodesics from the surface
  CertifiedMinimum df_drho;      // along rays from the base point
  CertifiedMinimum H_f;          // over the surface nodes
  double tolerance = 1e-9;
  bool real_weight = false;  // finite non-integer N
  std::vector<std::string> flags;
  std::string note = "sampled, not a proof";

  // All required checks that ran have minimum >= -tolerance.
  bool clean() const;
};

// Finite N needs Ric_f^N >= 0 only. N = inf also needs df/dr >= 0,
// df/drho >= 0 and H_f >= 0.
CertificationReport certify_hypotheses(const Smms& smms, const Embedding* surface, const SamplePlan& plan);

}  // namespace smms
