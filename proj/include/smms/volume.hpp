#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smms/hypersurface.hpp"
#include "smms/transport.hpp"

namespace smms {

// Directions on S^{n-1}: Gauss-Legendre colatitudes (with their sine
// weights) times a periodic azimuth.
struct AngularRule {
  std::vector<Vec> points;                  // unit vectors in R^n
  std::vector<std::vector<double>> angles;  // (theta_1..theta_{n-2}, phi)
  std::vector<double> weights;              // sum = |S^{n-1}|
};
AngularRule angular_rule(int n, int colatitude_order = 32, int azimuth_order = 64);

struct BallOptions {
  int colatitude_order = 32;
  int azimuth_order = 64;
  double eps_seed = 1e-4;
  // Repeat polar-pole transports with eps/2 and report the disagreement.
  bool seed_check = false;
  TransportOptions transport;
};

struct BallVolumes {
  std::vector<double> radii;
  std::vector<double> volume;
  // Largest relative change of a largest-radius ray volume under
  // eps -> eps/2 (sampled directions); NaN when not computed.
  double seed_disagreement = std::nan("");
  std::size_t focal_directions = 0;
  double df_drho_min = 0.0;
};

BallVolumes weighted_ball_volumes(const Smms& smms, const BasePoint& p0, std::span<const double> radii,
                                  const BallOptions& opts = {});
double weighted_ball_volume(const Smms& smms, const BasePoint& p0, double r, const BallOptions& opts = {});
// vol_f(B(r)) / (omega_k r^k)
double theta_f(const Smms& smms, const BasePoint& p0, double r, const BallOptions& opts = {});

struct ThetaSeries {
  std::vector<double> radii;
  std::vector<double> theta;
  std::vector<double> volume;
  bool monotone_ok = true;
  double max_increase = 0.0;
  std::size_t max_increase_index = 0;
  double avr_upper = 0.0;
  double avr_extrapolated = 0.0;
  // Least-squares fit theta ~ a + b / r over the tail of the schedule.
  double fit_intercept = 0.0;
  double fit_slope = 0.0;
  double fit_residual = 0.0;
  std::size_t fit_points = 0;
  double k = 0.0;
  double monotone_tolerance = 1e-7;
  double seed_disagreement = std::nan("");
  std::vector<std::string> warnings;
};

// Fills monotonicity, bracket and fit from radii/theta/volume.
void finish_series(ThetaSeries& series, bool hypotheses_clean);

ThetaSeries avr_estimate(const Smms& smms, const BasePoint& p0, std::span<const double> schedule,
                         const BallOptions& opts = {}, bool hypotheses_clean = false);

struct TubeSpec {
  Embedding embedding;
  std::optional<double> interior_volume;
  double R = 1.0;
};

struct TubeVolumes {
  std::vector<double> radii;
  std::vector<double> volume;  // vol_f of the tube, interior included
  double interior_volume = 0.0;
  std::size_t focal_nodes = 0;
  std::optional<double> min_focal_r;
  std::size_t nodes = 0;
};

// Weighted volume of a region star-shaped about p0 and bounded by the
// embedding (rays from p0 stopped at the level set).
double interior_volume(const Smms& smms, const BasePoint& p0, const Embedding& emb, const BallOptions& opts = {});

TubeVolumes tube_volumes(const Smms& smms, const Embedding& emb, double interior, std::span<const double> radii,
                         const TransportOptions& opts = {});
// Interior volume is computed from the base point of the space when the tube
// does not supply it.
double tube_volume(const Smms& smms, const TubeSpec& tube, const BallOptions& opts = {});

// vol_f(T(r)) / (omega_k r^k) series, with the same fit as avr_estimate.
ThetaSeries tube_theta_series(const Smms& smms, const Embedding& emb, double interior, std::span<const double> radii,
                              const TransportOptions& opts = {});

std::optional<double> focal_time(const RadialTransport& transport);

}  // namespace smms
