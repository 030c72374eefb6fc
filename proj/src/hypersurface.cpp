#include "smms/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smms/error.hpp"
#include "smms/kernels.hpp"
#include "smms/parallel.hpp"
#include "smms/quadrature.hpp"

namespace smms {
namespace {

constexpr double kPi = std::numbers::pi;

// Unit sphere S^{n-1} in R^n from angles (theta_1..theta_{n-2}, phi).
void hyperspherical(int n, std::span<const Jet> a, std::span<Jet> s) {
  Jet prod(1.0);
  for (int i = 0; i < n - 2; ++i) {
    s[i] = prod * cos(a[i]);
    prod = prod * sin(a[i]);
  }
  s[n - 2] = prod * cos(a[n - 2]);
  s[n - 1] = prod * sin(a[n - 2]);
}

std::vector<Interval> sphere_axes(int n) {
  std::vector<Interval> axes;
  for (int i = 0; i < n - 2; ++i) axes.push_back({0.0, kPi, false});
  axes.push_back({0.0, 2.0 * kPi, true});
  return axes;
}

std::vector<int> sphere_orders(int n, int colatitude, int azimuth) {
  std::vector<int> orders(n - 2, colatitude);
  orders.push_back(azimuth);
  return orders;
}

void check_dim(int n) {
  if (n < 2 || n > kMaxDim) throw DomainError("embedding: ambient dimension out of range");
}

}  // namespace

ChartPoint Embedding::point(const Vec& u) const {
  std::array<Jet, kMaxDim> uj{}, xj{};
  for (int a = 0; a < param_dim(); ++a) uj[a] = Jet(u(a));
  map(std::span<const Jet>(uj.data(), param_dim()), std::span<Jet>(xj.data(), ambient_dim));
  ChartPoint x(ambient_dim);
  for (int i = 0; i < ambient_dim; ++i) x(i) = xj[i].value();
  return x;
}

Embedding Embedding::with_orders(std::vector<int> new_orders) const {
  if (new_orders.size() != param_axes.size()) throw DomainError("embedding: one quadrature order per axis");
  for (int o : new_orders)
    if (o < 1) throw DomainError("embedding: quadrature orders must be >= 1");
  Embedding e = *this;
  e.orders = std::move(new_orders);
  return e;
}

Embedding Embedding::flip() const {
  Embedding e = *this;
  e.flipped = !flipped;
  return e;
}

Embedding sphere_embedding(int n, double rho, const Vec& center, int colatitude_order, int azimuth_order,
                           const Mat& rotation) {
  check_dim(n);
  if (!(rho > 0.0)) throw DomainError("sphere: radius must be positive");
  return ellipsoid_embedding(n, Vec::Constant(n, rho), center, rotation, colatitude_order, azimuth_order);
}

Embedding ellipsoid_embedding(int n, const Vec& semi_axes, const Vec& center, const Mat& rotation,
                              int colatitude_order, int azimuth_order) {
  check_dim(n);
  if (semi_axes.size() != n || center.size() != n) throw DomainError("ellipsoid: dimension mismatch");
  if ((semi_axes.array() <= 0.0).any()) throw DomainError("ellipsoid: semi-axes must be positive");
  Mat rot = rotation.size() == 0 ? Mat(Mat::Identity(n, n)) : rotation;
  if (rot.rows() != n || rot.cols() != n || !(rot.transpose() * rot).isIdentity(1e-10))
    throw DomainError("ellipsoid: rotation must be orthogonal");
  const bool round = (semi_axes.array() == semi_axes(0)).all();
  Embedding e;
  e.kind = round ? "sphere" : "ellipsoid";
  e.ambient_dim = n;
  e.param_axes = sphere_axes(n);
  e.orders = sphere_orders(n, colatitude_order, azimuth_order);
  e.map = [n, semi_axes, center, rot](std::span<const Jet> u, std::span<Jet> x) {
    std::array<Jet, kMaxDim> s{};
    hyperspherical(n, u, std::span<Jet>(s.data(), n));
    for (int i = 0; i < n; ++i) {
      Jet acc(center(i));
      for (int j = 0; j < n; ++j) acc = acc + (rot(i, j) * semi_axes(j)) * s[j];
      x[i] = acc;
    }
  };
  e.outward = [center](const ChartPoint& x) -> Vec { return x - center; };
  e.level = [semi_axes, center, rot](const ChartPoint& x) {
    const Vec local = rot.transpose() * (x - center);
    return local.cwiseQuotient(semi_axes).norm() - 1.0;
  };
  return e;
}

Embedding polar_sphere_embedding(int n, double rho, int colatitude_order, int azimuth_order) {
  check_dim(n);
  if (!std::isfinite(rho)) throw DomainError("polar sphere: radius must be finite");
  Embedding e;
  e.kind = "polar_sphere";
  e.ambient_dim = n;
  e.param_axes = sphere_axes(n);
  e.orders = sphere_orders(n, colatitude_order, azimuth_order);
  e.map = [n, rho](std::span<const Jet> u, std::span<Jet> x) {
    x[0] = Jet(rho);
    for (int i = 1; i < n; ++i) x[i] = u[i - 1];
  };
  e.outward = [n](const ChartPoint&) -> Vec {
    Vec v = Vec::Zero(n);
    v(0) = 1.0;
    return v;
  };
  e.level = [rho](const ChartPoint& x) { return x(0) - rho; };
  return e;
}

Embedding cylinder_embedding(double rho, double half_length) {
  if (!(rho > 0.0) || !(half_length > 0.0)) throw DomainError("cylinder: radius and length must be positive");
  Embedding e;
  e.kind = "cylinder";
  e.ambient_dim = 3;
  e.param_axes = {{0.0, 2.0 * kPi, true}, {-half_length, half_length, false}};
  e.orders = {32, 16};
  e.map = [rho](std::span<const Jet> u, std::span<Jet> x) {
    x[0] = rho * cos(u[0]);
    x[1] = rho * sin(u[0]);
    x[2] = u[1];
  };
  e.outward = [](const ChartPoint& x) -> Vec { return make_vec({x(0), x(1), 0.0}); };
  return e;
}

Embedding plane_embedding(int n, double height, double half_width) {
  check_dim(n);
  if (!(half_width > 0.0)) throw DomainError("plane: half width must be positive");
  Embedding e;
  e.kind = "plane";
  e.ambient_dim = n;
  e.param_axes.assign(n - 1, Interval{-half_width, half_width, false});
  e.orders.assign(n - 1, 8);
  e.map = [n, height](std::span<const Jet> u, std::span<Jet> x) {
    for (int i = 0; i < n - 1; ++i) x[i] = u[i];
    x[n - 1] = Jet(height);
  };
  e.outward = [n](const ChartPoint&) -> Vec {
    Vec v = Vec::Zero(n);
    v(n - 1) = 1.0;
    return v;
  };
  return e;
}

ShapeData shape_operator(const Embedding& emb, const MetricField& metric, const Vec& u) {
  const int n = emb.ambient_dim, m = emb.param_dim();
  if (metric.dim() != n) throw DomainError("shape_operator: embedding and metric dimensions differ");
  if (u.size() != m) throw DomainError("shape_operator: parameter has the wrong dimension");
  std::array<Jet, kMaxDim> uj{}, xj{};
  for (int a = 0; a < m; ++a) uj[a] = Jet::variable(m, a, u(a));
  emb.map(std::span<const Jet>(uj.data(), m), std::span<Jet>(xj.data(), n));

  ShapeData out;
  out.u = u;
  out.x.resize(n);
  Mat t(n, m);
  for (int i = 0; i < n; ++i) {
    out.x(i) = xj[i].value();
    for (int a = 0; a < m; ++a) t(i, a) = xj[i].d(a);
  }
  const LocalGeometry geo = LocalGeometry::at(metric, out.x);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(t), Eigen::ComputeFullU);
  const auto sv = svd.singularValues();
  if (!(sv(m - 1) > 1e-12 * std::max(1.0, sv(0)))) throw DomainError("shape_operator: differential is rank deficient");
  // Covector annihilating the tangent space.
  const Vec xi = svd.matrixU().col(n - 1);
  const double norm2 = xi.dot(geo.ginv * xi);
  if (!(norm2 > 0.0)) throw NumericalError("shape_operator: normal construction failed");
  Vec nu = geo.ginv * xi / std::sqrt(norm2);
  double orient = xi.dot(emb.outward(out.x));
  if (orient == 0.0) throw NumericalError("shape_operator: outward hint is tangent to the surface");
  if (orient < 0.0) nu = -nu;
  if (emb.flipped) nu = -nu;
  out.normal = nu;

  const Vec gnu = geo.g * nu;
  Mat second(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Vec acc = geo.contract(t.col(a), t.col(b));
      for (int i = 0; i < n; ++i) acc(i) += xj[i].dd(a, b);
      second(a, b) = second(b, a) = -gnu.dot(acc);
    }
  const Mat induced = t.transpose() * geo.g * t;
  Eigen::LLT<Mat> llt(induced);
  if (llt.info() != Eigen::Success) throw NumericalError("shape_operator: induced metric not positive definite");
  const Mat lower = llt.matrixL();
  const Mat c = lower.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(m, m));
  out.frame = t * c;
  const Mat shape = c.transpose() * second * c;
  out.shape = 0.5 * (shape + shape.transpose());
  out.H = out.shape.trace();
  out.H_f = out.H;
  out.area_weight = lower.diagonal().prod();
  return out;
}

ShapeData shape_data(const Embedding& emb, const Smms& smms, const Vec& u) {
  ShapeData s = shape_operator(emb, smms.metric, u);
  const DensitySample f = smms.density.sample(s.x);
  s.f_at = f.value;
  s.H_f = s.H - f.gradient.dot(s.normal);
  return s;
}

WeightedMeanCurvature weighted_mean_curvature(const Embedding& emb, const Smms& smms, const Vec& u) {
  const ShapeData s = shape_data(emb, smms, u);
  return {s.H, s.H_f};
}

SurfaceNodes surface_nodes(const Embedding& emb) {
  const int m = emb.param_dim();
  if (static_cast<int>(emb.orders.size()) != m) throw DomainError("embedding: one quadrature order per axis");
  std::vector<Rule1D> rules;
  for (int a = 0; a < m; ++a) {
    const Interval& ax = emb.param_axes[a];
    if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi)) throw DomainError("embedding: parameter axes must be bounded");
    rules.push_back(ax.periodic ? periodic_rule(emb.orders[a], ax.lo, ax.hi)
                                : gauss_legendre(emb.orders[a], ax.lo, ax.hi));
  }
  SurfaceNodes nodes;
  std::vector<int> idx(m, 0);
  while (true) {
    Vec u(m);
    double w = 1.0;
    for (int a = 0; a < m; ++a) {
      u(a) = rules[a].nodes[idx[a]];
      w *= rules[a].weights[idx[a]];
    }
    nodes.params.push_back(u);
    nodes.weights.push_back(w);
    int a = m - 1;
    while (a >= 0 && ++idx[a] == static_cast<int>(rules[a].nodes.size())) idx[a--] = 0;
    if (a < 0) break;
  }
  return nodes;
}

namespace {

double integrate_once(const Embedding& emb, const std::function<ShapeData(const Vec&)>& shape,
                      const SurfaceIntegrand& integrand, std::size_t* count) {
  const SurfaceNodes nodes = surface_nodes(emb);
  std::vector<double> values(nodes.params.size());
  parallel_for(values.size(), [&](std::size_t i) {
    const ShapeData s = shape(nodes.params[i]);
    const double v = integrand(s);
    if (!std::isfinite(v)) throw NumericalError("surface_integrate: non-finite integrand at a quadrature node");
    values[i] = v * s.area_weight;
  });
  if (count != nullptr) *count = values.size();
  return kernels::dot(values, nodes.weights);
}

Integral integrate_with_estimate(const Embedding& emb, const std::function<ShapeData(const Vec&)>& shape,
                                 const SurfaceIntegrand& integrand) {
  Integral out;
  out.value = integrate_once(emb, shape, integrand, &out.nodes);
  std::vector<int> half;
  for (int o : emb.orders) half.push_back(std::max(2, o / 2));
  const double coarse = integrate_once(emb.with_orders(half), shape, integrand, nullptr);
  out.error = std::max(std::abs(out.value - coarse), 64.0 * std::numeric_limits<double>::epsilon() *
                                                          std::max(1.0, std::abs(out.value)));
  return out;
}

}  // namespace

Integral surface_integrate(const Embedding& emb, const Smms& smms, const SurfaceIntegrand& integrand) {
  return integrate_with_estimate(emb, [&](const Vec& u) { return shape_data(emb, smms, u); }, integrand);
}

Integral surface_integrate(const Embedding& emb, const MetricField& metric, const SurfaceIntegrand& integrand) {
  return integrate_with_estimate(emb, [&](const Vec& u) { return shape_operator(emb, metric, u); }, integrand);
}

std::string mode_name(IntegrandMode mode) {
  switch (mode) {
    case IntegrandMode::absolute: return "absolute";
    case IntegrandMode::positive_part: return "positive_part";
    case IntegrandMode::plain_power: return "plain_power";
  }
  return "?";
}

IntegrandMode parse_mode(const std::string& name) {
  if (name == "absolute") return IntegrandMode::absolute;
  if (name == "positive_part") return IntegrandMode::positive_part;
  if (name == "plain_power") return IntegrandMode::plain_power;
  throw DomainError("unknown integrand mode '" + name + "'");
}

IntegrandMode default_mode(const Weight& weight) {
  return weight.is_infinite() ? IntegrandMode::plain_power : IntegrandMode::absolute;
}

WillmoreLhs willmore_lhs(const Embedding& emb, const Smms& smms, IntegrandMode mode, std::optional<double> k) {
  const double kk = smms.k();
  if (k && std::abs(*k - kk) > 1e-12 * kk)
    throw DomainError("willmore_lhs: explicit k = " + std::to_string(*k) + " disagrees with the space (k = " +
                      std::to_string(kk) + ")");
  const double p = kk - 1.0;
  const bool integer_power = p == std::round(p);

  WillmoreLhs out;
  out.mode = mode;
  out.k = kk;
  const SurfaceNodes nodes = surface_nodes(emb);
  std::vector<double> hf(nodes.params.size());
  parallel_for(hf.size(), [&](std::size_t i) { hf[i] = shape_data(emb, smms, nodes.params[i]).H_f; });
  out.min_H_f = hf.empty() ? 0.0 : *std::min_element(hf.begin(), hf.end());
  if (out.min_H_f < 0.0) {
    out.warnings.push_back("H_f < 0 at some quadrature node (min " + std::to_string(out.min_H_f) + ")");
    if (mode == IntegrandMode::plain_power && !integer_power)
      throw DomainError("willmore_lhs: signed power with negative H_f and non-integer exponent");
  }
  const SurfaceIntegrand integrand = [&](const ShapeData& s) {
    double h = s.H_f / p;
    switch (mode) {
      case IntegrandMode::absolute: h = std::abs(h); break;
      case IntegrandMode::positive_part: h = std::max(h, 0.0); break;
      case IntegrandMode::plain_power: break;
    }
    return std::pow(h, p) * std::exp(-s.f_at);
  };
  const Integral I = surface_integrate(emb, smms, integrand);
  out.value = I.value;
  out.error = I.error;
  out.nodes = I.nodes;
  return out;
}

}  // namespace smms
