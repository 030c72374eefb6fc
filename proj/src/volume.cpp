#include "smms/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smms/error.hpp"
#include "smms/kernels.hpp"
#include "smms/parallel.hpp"
#include "smms/quadrature.hpp"

namespace smms {
namespace {

void check_radii(std::span<const double> radii) {
  if (radii.empty()) throw DomainError("radius schedule is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw DomainError("radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly increasing");
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

AngularRule angular_rule(int n, int colatitude_order, int azimuth_order) {
  if (n < 2 || n > kMaxDim) throw DomainError("angular_rule: dimension out of range");
  if (colatitude_order < 1 || azimuth_order < 1) throw DomainError("angular_rule: orders must be >= 1");
  const int m = n - 1;
  std::vector<Rule1D> rules;
  for (int i = 0; i < n - 2; ++i) {
    Rule1D r = gauss_legendre(colatitude_order, 0.0, std::numbers::pi);
    for (std::size_t j = 0; j < r.nodes.size(); ++j) r.weights[j] *= std::pow(std::sin(r.nodes[j]), n - 2 - i);
    rules.push_back(std::move(r));
  }
  rules.push_back(periodic_rule(azimuth_order, 0.0, 2.0 * std::numbers::pi));

  AngularRule out;
  std::vector<int> idx(m, 0);
  while (true) {
    std::vector<double> ang(m);
    double w = 1.0;
    for (int a = 0; a < m; ++a) {
      ang[a] = rules[a].nodes[idx[a]];
      w *= rules[a].weights[idx[a]];
    }
    Vec s(n);
    double prod = 1.0;
    for (int i = 0; i < n - 2; ++i) {
      s(i) = prod * std::cos(ang[i]);
      prod *= std::sin(ang[i]);
    }
    s(n - 2) = prod * std::cos(ang[m - 1]);
    s(n - 1) = prod * std::sin(ang[m - 1]);
    out.points.push_back(s);
    out.angles.push_back(std::move(ang));
    out.weights.push_back(w);
    int a = m - 1;
    while (a >= 0 && ++idx[a] == static_cast<int>(rules[a].nodes.size())) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

BallVolumes weighted_ball_volumes(const Smms& smms, const BasePoint& p0, std::span<const double> radii,
                                  const BallOptions& opts) {
  check_radii(radii);
  const int n = smms.dim();
  if (p0.point.size() != n) throw DomainError("base point has the wrong dimension");
  const AngularRule rule = angular_rule(n, opts.colatitude_order, opts.azimuth_order);
  const std::size_t dirs = rule.points.size(), nr = radii.size();
  std::vector<double> values(dirs * nr);  // radius-major
  std::vector<char> focal(dirs, 0);
  std::vector<double> dfmin(dirs);
  parallel_for(dirs, [&](std::size_t d) {
    const RayStart rs = ray_from_base(smms, p0, rule.points[d], rule.angles[d], opts.eps_seed);
    const RayResult rr = point_ray(smms, rs, radii, nullptr, opts.transport);
    for (std::size_t j = 0; j < nr; ++j) values[j * dirs + d] = rr.volume[j];
    focal[d] = rr.focal_r.has_value();
    dfmin[d] = rr.df_dr_min;
  });
  BallVolumes out;
  out.radii.assign(radii.begin(), radii.end());
  for (std::size_t j = 0; j < nr; ++j)
    out.volume.push_back(kernels::dot(std::span<const double>(values.data() + j * dirs, dirs), rule.weights));
  out.focal_directions = static_cast<std::size_t>(std::count(focal.begin(), focal.end(), 1));
  out.df_drho_min = *std::min_element(dfmin.begin(), dfmin.end());

  if (opts.seed_check && p0.polar_pole) {
    // Worst per-direction change under eps -> eps/2, on about 64 directions.
    const std::size_t stride = std::max<std::size_t>(1, dirs / 64);
    std::vector<std::size_t> picked;
    for (std::size_t d = 0; d < dirs; d += stride) picked.push_back(d);
    std::vector<double> change(picked.size());
    const double last = radii.back();
    parallel_for(picked.size(), [&](std::size_t i) {
      const std::size_t d = picked[i];
      const RayStart rs = ray_from_base(smms, p0, rule.points[d], rule.angles[d], 0.5 * opts.eps_seed);
      const double half = point_ray(smms, rs, std::span<const double>(&last, 1), nullptr, opts.transport).volume[0];
      const double full = values[(nr - 1) * dirs + d];
      change[i] = std::abs(half - full) / std::max(std::abs(half), 1e-300);
    });
    out.seed_disagreement = *std::max_element(change.begin(), change.end());
  }
  return out;
}

double weighted_ball_volume(const Smms& smms, const BasePoint& p0, double r, const BallOptions& opts) {
  return weighted_ball_volumes(smms, p0, std::span<const double>(&r, 1), opts).volume[0];
}

double theta_f(const Smms& smms, const BasePoint& p0, double r, const BallOptions& opts) {
  const double k = smms.k();
  return weighted_ball_volume(smms, p0, r, opts) / (unit_ball_volume(k) * std::pow(r, k));
}

void finish_series(ThetaSeries& s, bool hypotheses_clean) {
  const std::size_t n = s.theta.size();
  if (n == 0) throw DomainError("empty theta series");
  double scale = 0.0;
  for (double t : s.theta) scale = std::max(scale, std::abs(t));
  const auto inc = kernels::max_increase(s.theta);
  const double tol = s.monotone_tolerance * std::max(scale, 1e-300);
  s.max_increase = inc.found() ? inc.value : 0.0;
  s.max_increase_index = inc.found() ? inc.index + 1 : 0;
  s.monotone_ok = !(s.max_increase > tol);
  s.avr_upper = s.theta.back();

  const std::size_t tail = std::min(n, std::max<std::size_t>(3, (n + 1) / 2));
  const std::size_t first = n - tail;
  s.fit_points = tail;
  if (tail == 1) {
    s.fit_intercept = s.theta.back();
    s.fit_slope = 0.0;
    s.fit_residual = 0.0;
  } else {
    Eigen::MatrixXd a(tail, 2);
    Eigen::VectorXd b(tail);
    for (std::size_t i = 0; i < tail; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = 1.0 / s.radii[first + i];
      b(i) = s.theta[first + i];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    s.fit_intercept = c(0);
    s.fit_slope = c(1);
    s.fit_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(tail));
  }
  s.avr_extrapolated = std::max(0.0, s.fit_intercept);
  if (s.fit_intercept < 0.0)
    s.warnings.push_back("fit intercept " + fmt(s.fit_intercept) + " is negative; extrapolated ratio clamped to 0");

  if (!s.monotone_ok) {
    const std::string where = "theta increased by " + fmt(s.max_increase) + " at r = " + fmt(s.radii[s.max_increase_index]);
    s.warnings.push_back(hypotheses_clean ? "numerical-resolution failure: " + where
                                          : where + " (hypotheses not certified, monotonicity not expected)");
  }
  if (s.seed_disagreement > 1e-8)
    s.warnings.push_back("pole seed not converged: eps -> eps/2 changes the volume by " + fmt(s.seed_disagreement));
  if (n >= 2 && !s.volume.empty()) {
    const double a = s.volume[n - 2], b = s.volume[n - 1];
    if (b > 0.0 && std::abs(b - a) <= 1e-9 * b) s.warnings.push_back("finite total weighted volume");
  }
}

ThetaSeries avr_estimate(const Smms& smms, const BasePoint& p0, std::span<const double> schedule,
                         const BallOptions& opts, bool hypotheses_clean) {
  if (schedule.size() < 4) throw DomainError("avr_estimate: need at least 4 radii");
  const BallVolumes balls = weighted_ball_volumes(smms, p0, schedule, opts);
  ThetaSeries s;
  s.k = smms.k();
  s.radii = balls.radii;
  s.volume = balls.volume;
  const double omega = unit_ball_volume(s.k);
  for (std::size_t i = 0; i < s.radii.size(); ++i) s.theta.push_back(s.volume[i] / (omega * std::pow(s.radii[i], s.k)));
  s.seed_disagreement = balls.seed_disagreement;
  finish_series(s, hypotheses_clean);
  return s;
}

double interior_volume(const Smms& smms, const BasePoint& p0, const Embedding& emb, const BallOptions& opts) {
  if (!emb.level) throw DomainError("interior_volume: the embedding does not bound a region");
  const int n = smms.dim();
  // Star-shapedness about p0 at the quadrature nodes.
  const SurfaceNodes nodes = surface_nodes(emb);
  for (const Vec& u : nodes.params) {
    const ShapeData sd = shape_operator(emb, smms.metric, u);
    const Mat g = smms.metric.at(sd.x);
    double radial;
    if (p0.polar_pole) {
      radial = (g * sd.normal)(0);
    } else {
      radial = (sd.x - p0.point).dot(g * sd.normal);
    }
    if (!(radial > 0.0)) throw DomainError("interior_volume: region is not star-shaped about the base point");
  }
  const AngularRule rule = angular_rule(n, opts.colatitude_order, opts.azimuth_order);
  std::vector<double> values(rule.points.size());
  const LevelFunction level = emb.level;
  parallel_for(values.size(), [&](std::size_t d) {
    const RayStart rs = ray_from_base(smms, p0, rule.points[d], rule.angles[d], opts.eps_seed);
    if (!(level(rs.x) < 0.0)) throw DomainError("interior_volume: base point is not inside the region");
    values[d] = point_ray(smms, rs, {}, &level, opts.transport).exit_volume;
  });
  return kernels::dot(values, rule.weights);
}

TubeVolumes tube_volumes(const Smms& smms, const Embedding& emb, double interior, std::span<const double> radii,
                         const TransportOptions& opts) {
  check_radii(radii);
  if (!(interior >= 0.0)) throw DomainError("tube_volumes: interior volume must be >= 0");
  const SurfaceNodes nodes = surface_nodes(emb);
  const std::size_t count = nodes.params.size(), nr = radii.size();
  std::vector<double> grid{0.0};
  grid.insert(grid.end(), radii.begin(), radii.end());
  std::vector<double> values(count * nr);
  std::vector<double> focal(count, std::nan(""));
  parallel_for(count, [&](std::size_t i) {
    const ShapeData sd = shape_data(emb, smms, nodes.params[i]);
    const RadialTransport tr = radial_transport(smms, sd.transport_start(), grid, opts);
    for (std::size_t j = 0; j < nr; ++j) {
      const double v = j + 1 < tr.size() ? tr.volume[j + 1] : tr.total_volume;
      values[j * count + i] = v * sd.area_weight;
    }
    if (tr.focal_r) focal[i] = *tr.focal_r;
  });
  TubeVolumes out;
  out.radii.assign(radii.begin(), radii.end());
  out.interior_volume = interior;
  out.nodes = count;
  for (std::size_t j = 0; j < nr; ++j)
    out.volume.push_back(interior + kernels::dot(std::span<const double>(values.data() + j * count, count), nodes.weights));
  for (double f : focal)
    if (!std::isnan(f)) {
      ++out.focal_nodes;
      out.min_focal_r = out.min_focal_r ? std::min(*out.min_focal_r, f) : f;
    }
  return out;
}

double tube_volume(const Smms& smms, const TubeSpec& tube, const BallOptions& opts) {
  if (!(tube.R > 0.0)) throw DomainError("tube_volume: R must be positive");
  double interior;
  if (tube.interior_volume) {
    interior = *tube.interior_volume;
  } else {
    if (!smms.base) throw DomainError("tube_volume: no interior volume and no base point");
    interior = interior_volume(smms, *smms.base, tube.embedding, opts);
  }
  return tube_volumes(smms, tube.embedding, interior, std::span<const double>(&tube.R, 1), opts.transport).volume[0];
}

ThetaSeries tube_theta_series(const Smms& smms, const Embedding& emb, double interior, std::span<const double> radii,
                              const TransportOptions& opts) {
  const TubeVolumes tv = tube_volumes(smms, emb, interior, radii, opts);
  ThetaSeries s;
  s.k = smms.k();
  s.radii = tv.radii;
  s.volume = tv.volume;
  const double omega = unit_ball_volume(s.k);
  for (std::size_t i = 0; i < s.radii.size(); ++i) s.theta.push_back(s.volume[i] / (omega * std::pow(s.radii[i], s.k)));
  finish_series(s, false);
  return s;
}

std::optional<double> focal_time(const RadialTransport& transport) { return transport.focal_r; }

}  // namespace smms
