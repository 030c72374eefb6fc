#include "smms/transport.hpp"

#include <algorithm>
#include <cmath>

#include "smms/error.hpp"
#include "smms/ode.hpp"

namespace smms {
namespace {

// State: position (n), velocity (n), parallel frame (n x m), J (m x m),
// J' (m x m), accumulated weighted volume (1). Matrices are column-major.
struct Layout {
  int n, m;
  int pos, vel, frame, jac, djac, vol, size;
  explicit Layout(int dim) : n(dim), m(dim - 1) {
    pos = 0;
    vel = n;
    frame = 2 * n;
    jac = frame + n * m;
    djac = jac + m * m;
    vol = djac + m * m;
    size = vol + 1;
  }
};

using CMap = Eigen::Map<const Eigen::MatrixXd>;

struct View {
  ChartPoint x;
  Vec v;
  Mat e, j, p;
  double vol;
  View(const Layout& L, std::span<const double> y)
      : x(CMap(y.data() + L.pos, L.n, 1)),
        v(CMap(y.data() + L.vel, L.n, 1)),
        e(CMap(y.data() + L.frame, L.n, L.m)),
        j(CMap(y.data() + L.jac, L.m, L.m)),
        p(CMap(y.data() + L.djac, L.m, L.m)),
        vol(y[L.vol]) {}
};

void store(const Layout& L, std::span<double> y, const Vec& x, const Vec& v, const Mat& e, const Mat& j,
           const Mat& p, double vol) {
  Eigen::Map<Eigen::MatrixXd>(y.data() + L.pos, L.n, 1) = x;
  Eigen::Map<Eigen::MatrixXd>(y.data() + L.vel, L.n, 1) = v;
  Eigen::Map<Eigen::MatrixXd>(y.data() + L.frame, L.n, L.m) = e;
  Eigen::Map<Eigen::MatrixXd>(y.data() + L.jac, L.m, L.m) = j;
  Eigen::Map<Eigen::MatrixXd>(y.data() + L.djac, L.m, L.m) = p;
  y[L.vol] = vol;
}

ode::Rhs jacobi_rhs(const Smms& smms, const Layout& L) {
  return [&smms, L](double, std::span<const double> y, std::span<double> dy) {
    const View s(L, y);
    const LocalGeometry geo = LocalGeometry::at(smms.metric, s.x);
    Mat de(L.n, L.m);
    for (int a = 0; a < L.m; ++a) de.col(a) = -geo.contract(s.v, s.e.col(a));
    Mat r = s.e.transpose() * geo.g * geo.tidal(s.v) * s.e;
    r = (0.5 * (r + r.transpose())).eval();
    const Mat dp = -r * s.j;
    const double weight = std::exp(-smms.density.value(s.x));
    const double det = L.m == 0 ? 1.0 : s.j.determinant();
    store(L, dy, s.v, -geo.contract(s.v, s.v), de, s.p, dp, weight * det);
  };
}

ode::Integrator make_integrator(const Smms& smms, const Layout& L, const TransportOptions& opts) {
  ode::Options o;
  o.rtol = opts.rtol;
  o.atol = opts.atol;
  return ode::Integrator(jacobi_rhs(smms, L), static_cast<std::size_t>(L.size), o);
}

[[noreturn]] void fail(const Smms& smms, const Layout& L, const ode::Integrator& integ, const char* who) {
  const View s(L, integ.y());
  const double scale = 1.0 + s.x.lpNorm<Eigen::Infinity>();
  if (distance_to_boundary(smms.metric.domain(), s.x) < 1e-6 * scale)
    throw DomainError(std::string(who) + ": geodesic left the chart at t=" + std::to_string(integ.t()));
  throw NumericalError(std::string(who) + ": " + integ.failure() + " at t=" + std::to_string(integ.t()));
}

double radial_derivative(const Smms& smms, const ChartPoint& x, const Vec& v) {
  const DensitySample f = smms.density.sample(x);
  const Mat g = smms.metric.at(x);
  return f.gradient.dot(v) / std::sqrt(v.dot(g * v));
}

}  // namespace

RadialTransport radial_transport(const Smms& smms, const TransportStart& start, std::span<const double> r_grid,
                                 const TransportOptions& opts) {
  const int n = smms.dim();
  const Layout L(n);
  if (r_grid.empty() || r_grid.front() != 0.0) throw DomainError("radial_transport: grid must start at r = 0");
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) throw DomainError("radial_transport: grid must be increasing");
  if (start.frame.rows() != n || start.frame.cols() != L.m || start.shape.rows() != L.m ||
      start.shape.cols() != L.m)
    throw DomainError("radial_transport: frame or shape has the wrong size");
  if ((start.shape - start.shape.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + start.shape.norm()))
    throw DomainError("radial_transport: initial shape operator is not symmetric");

  RadialTransport out;
  out.k = smms.k();
  out.f_at = smms.density.value(start.x);
  const double df0 = radial_derivative(smms, start.x, start.normal);
  out.H_f = start.shape.trace() - df0;

  std::vector<double> y0(L.size);
  store(L, y0, start.x, start.normal, start.frame, Mat::Identity(L.m, L.m), start.shape, 0.0);
  ode::Integrator integ = make_integrator(smms, L, opts);
  integ.reset(0.0, y0);

  const ode::Event focal = [&](double, std::span<const double> y) {
    const View s(L, y);
    const double det = s.j.determinant();
    if (det <= opts.focal_det) return det - opts.focal_det;
    const double m = s.j.partialPivLu().solve(s.p).trace();
    if (!(std::abs(m) < opts.focal_m)) return -1.0;
    return det - opts.focal_det;
  };

  const double k1 = out.k - 1.0;
  out.df_dr_min = std::numeric_limits<double>::infinity();
  for (double r : r_grid) {
    if (r > 0.0) {
      const ode::Status st = integ.advance(r, &focal);
      if (st == ode::Status::event) {
        out.focal_r = integ.event_time();
        out.total_volume = integ.y()[L.vol];
        break;
      }
      if (st == ode::Status::failed) fail(smms, L, integ, "radial_transport");
    }
    const View s(L, integ.y());
    Mat shape = s.p * s.j.inverse();
    shape = (0.5 * (shape + shape.transpose())).eval();
    const DensitySample f = smms.density.sample(s.x);
    const Mat g = smms.metric.at(s.x);
    const double speed = std::sqrt(s.v.dot(g * s.v));
    const double df = f.gradient.dot(s.v) / speed;
    const double a = s.j.determinant();
    const double af = std::exp(-f.value) * a;
    const double base = 1.0 + out.H_f * r / k1;
    out.r.push_back(r);
    out.m.push_back(shape.trace());
    out.m_f.push_back(shape.trace() - df);
    out.A.push_back(a);
    out.A_f.push_back(af);
    out.theta.push_back(base > 0.0 ? af / std::pow(base, k1) : std::nan(""));
    out.volume.push_back(s.vol);
    out.shape.push_back(std::move(shape));
    out.df_dr_min = std::min(out.df_dr_min, df);
    out.geodesic.samples.push_back({r, s.x, s.v, speed});
    out.total_volume = s.vol;
  }
  out.geodesic.end_t = out.r.back();
  return out;
}

RadialTransport radial_transport(const Smms& smms, const TransportStart& start, double r_max, int points,
                                 const TransportOptions& opts) {
  if (!(r_max > 0.0) || points < 2) throw DomainError("radial_transport: need r_max > 0 and >= 2 points");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = r_max * i / (points - 1);
  grid.back() = r_max;
  return radial_transport(smms, start, grid, opts);
}

RayStart ray_from_base(const Smms& smms, const BasePoint& base, const Vec& unit_direction,
                       std::span<const double> angles,
                       double eps_seed) {
  const int n = smms.dim();
  RayStart rs;
  if (base.polar_pole) {
    if (static_cast<int>(angles.size()) != n - 1) throw DomainError("polar ray needs n - 1 angles");
    if (!(eps_seed > 0.0)) throw DomainError("seed radius must be positive");
    rs.x = ChartPoint::Zero(n);
    rs.x(0) = eps_seed;
    for (int i = 1; i < n; ++i) rs.x(i) = angles[i - 1];
    rs.direction = Vec::Zero(n);
    rs.direction(0) = 1.0 / std::sqrt(smms.metric.at(rs.x)(0, 0));
    rs.t0 = eps_seed;
    // f at the pole, approached along the ray.
    ChartPoint near = rs.x;
    near(0) = eps_seed * 1e-3;
    rs.f_base = smms.density.value(near);
  } else {
    const ChartPoint& p0 = base.point;
    const Mat b = orthonormal_basis(smms.metric.at(p0));
    rs.x = p0;
    rs.direction = b * unit_direction;
    rs.t0 = 0.0;
    rs.f_base = smms.density.value(p0);
  }
  return rs;
}

RayResult point_ray(const Smms& smms, const RayStart& start, std::span<const double> stops,
                    const LevelFunction* level, const TransportOptions& opts) {
  const int n = smms.dim();
  const Layout L(n);
  const double t0 = start.t0;
  const Mat e0 = orthonormal_complement(smms.metric.at(start.x), start.direction);
  std::vector<double> y0(L.size);
  const double head = std::exp(-start.f_base) * std::pow(t0, n) / n;
  Mat j0 = t0 * Mat::Identity(L.m, L.m), p0 = Mat::Identity(L.m, L.m);
  if (t0 > 0.0) {
    // Seeded off the base: J = t - t^3 R / 6, J' = 1 - t^2 R / 2 to third order.
    const LocalGeometry geo = LocalGeometry::at(smms.metric, start.x);
    Mat r = e0.transpose() * geo.g * geo.tidal(start.direction) * e0;
    r = (0.5 * (r + r.transpose())).eval();
    j0 -= (t0 * t0 * t0 / 6.0) * r;
    p0 -= (0.5 * t0 * t0) * r;
  }
  store(L, y0, start.x, start.direction, e0, j0, p0, head);
  ode::Integrator integ = make_integrator(smms, L, opts);
  integ.reset(t0, y0);

  bool level_fired = false;
  const ode::Event event = [&](double t, std::span<const double> y) {
    const View s(L, y);
    const double ratio = s.j.determinant() / std::pow(t, L.m) - opts.focal_det;
    double value = ratio;
    bool from_level = false;
    if (level != nullptr) {
      const double lv = -(*level)(s.x);
      if (lv < value) {
        value = lv;
        from_level = true;
      }
    }
    if (value <= 0.0) level_fired = from_level;
    return value;
  };

  RayResult out;
  out.volume.reserve(stops.size());
  auto note_df = [&] {
    const View s(L, integ.y());
    out.df_dr_min = std::min(out.df_dr_min, radial_derivative(smms, s.x, s.v));
  };
  if (level != nullptr && !stops.empty()) throw DomainError("point transport: level stop and radius stops cannot be mixed");
  bool stopped = false;
  for (double stop : stops) {
    if (!stopped && stop > integ.t()) {
      const ode::Status st = integ.advance(stop, &event);
      if (st == ode::Status::failed) fail(smms, L, integ, "point transport");
      if (st == ode::Status::event) {
        out.focal_r = integ.event_time();
        stopped = true;
      }
      note_df();
    }
    out.volume.push_back(integ.y()[L.vol]);
  }
  if (level != nullptr) {
    double target = 1.0;
    while (!out.exit_t) {
      const ode::Status st = integ.advance(target, &event);
      if (st == ode::Status::failed) fail(smms, L, integ, "point transport");
      if (st == ode::Status::event) {
        if (!level_fired) throw DomainError("point transport: focal point before leaving the region");
        out.exit_t = integ.event_time();
        out.exit_volume = integ.y()[L.vol];
      }
      note_df();
      if (target > 1e8) throw DomainError("point transport: ray never leaves the region");
      target *= 2.0;
    }
  }
  return out;
}

}  // namespace smms
