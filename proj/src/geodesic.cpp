#include "smms/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "smms/error.hpp"
#include "smms/ode.hpp"

namespace smms {

double distance_to_boundary(const ChartDomain& domain, const ChartPoint& u) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.axes.size(); ++i) {
    const Interval& ax = domain.axes[i];
    if (ax.periodic) continue;
    const double x = u(static_cast<Eigen::Index>(i));
    d = std::min({d, x - ax.lo, ax.hi - x});
  }
  return d;
}

GeodesicPath integrate_geodesic(const MetricField& metric, const ChartPoint& x0, const Vec& v0, double r_max,
                                double tol, int sample_count) {
  const int n = metric.dim();
  if (!(r_max > 0.0)) throw DomainError("integrate_geodesic: r_max must be positive");
  if (x0.size() != n || v0.size() != n) throw DomainError("integrate_geodesic: dimension mismatch");
  const Mat g0 = metric.at(x0);
  const double speed0 = std::sqrt(v0.dot(g0 * v0));
  if (std::abs(speed0 - 1.0) > std::max(tol, 1e-12) * 10.0)
    throw DomainError("integrate_geodesic: initial velocity is not unit");
  sample_count = std::max(sample_count, 2);

  ode::Rhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    const ChartPoint x = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    const Vec v = Eigen::Map<const Eigen::VectorXd>(y.data() + n, n);
    const LocalGeometry geo = LocalGeometry::at(metric, x);
    const Vec a = -geo.contract(v, v);
    for (int i = 0; i < n; ++i) {
      dy[i] = v(i);
      dy[n + i] = a(i);
    }
  };
  ode::Options opts;
  opts.rtol = tol;
  opts.atol = tol * 1e-3;
  ode::Integrator integ(rhs, 2 * n, opts);
  std::vector<double> y0(2 * n);
  for (int i = 0; i < n; ++i) {
    y0[i] = x0(i);
    y0[n + i] = v0(i);
  }
  integ.reset(0.0, y0);

  GeodesicPath path;
  auto record = [&](double t) {
    GeodesicSample s;
    s.t = t;
    s.position = Eigen::Map<const Eigen::VectorXd>(integ.y().data(), n);
    s.velocity = Eigen::Map<const Eigen::VectorXd>(integ.y().data() + n, n);
    if (metric.domain().contains(s.position)) {
      const Mat g = metric.at(s.position);
      s.speed = std::sqrt(s.velocity.dot(g * s.velocity));
    } else {
      s.speed = std::nan("");
    }
    path.samples.push_back(std::move(s));
  };
  record(0.0);
  for (int i = 1; i < sample_count; ++i) {
    const double t = r_max * i / (sample_count - 1);
    const ode::Status st = integ.advance(t);
    if (st == ode::Status::failed) {
      const ChartPoint x = Eigen::Map<const Eigen::VectorXd>(integ.y().data(), n);
      const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
      if (distance_to_boundary(metric.domain(), x) < 1e-6 * scale) {
        path.exited_chart = true;
        path.end_t = integ.t();
        return path;
      }
      throw NumericalError("integrate_geodesic: " + integ.failure() + " at t=" + std::to_string(integ.t()));
    }
    record(t);
  }
  path.end_t = r_max;
  return path;
}

}  // namespace smms
