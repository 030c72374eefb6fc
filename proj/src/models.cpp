#include "smms/models.hpp"

#include <cmath>
#include <numbers>

#include "smms/error.hpp"
#include "smms/quadrature.hpp"

namespace smms {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Interval> polar_axes(int n, double r_min, double r_max) {
  std::vector<Interval> axes{{r_min, r_max, false}};
  for (int i = 0; i < n - 2; ++i) axes.push_back({0.0, kPi, false});
  axes.push_back({0.0, 2.0 * kPi, true});
  return axes;
}

// Diagonal metric dr^2 + s^2 g_{S^{n-1}} where s comes from the chart jets.
void polar_components(int n, std::span<const Jet> u, const Jet& scale, std::span<Jet> up) {
  for (auto& c : up) c = Jet(0.0);
  int p = 0;
  Jet angular = square(scale);
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      up[p] = Jet(1.0);
    } else {
      up[p] = angular;
      if (i < n - 1) angular = angular * square(sin(u[i]));
    }
    p += n - i;
  }
}

MetricField cartesian_metric(int n) {
  return MetricField(n, ChartDomain::whole(n), [n](std::span<const Jet>, std::span<Jet> up) {
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) up[p++] = Jet(i == j ? 1.0 : 0.0);
  });
}

Jet radius_jet(std::span<const Jet> x) {
  Jet s(0.0);
  for (const Jet& xi : x) s = s + square(xi);
  return sqrt(s);
}

double radius_value(std::span<const Jet> x) {
  double s = 0.0;
  for (const Jet& xi : x) s += xi.value() * xi.value();
  return std::sqrt(s);
}

// Unit sphere point from polar-chart angles u[1..n-1]; components beyond
// x3 are not exposed to expressions.
std::array<Jet, kMaxDim> sphere_point(int n, std::span<const Jet> u) {
  std::array<Jet, kMaxDim> s{};
  Jet prod(1.0);
  for (int i = 0; i < n - 2; ++i) {
    s[i] = prod * cos(u[1 + i]);
    prod = prod * sin(u[1 + i]);
  }
  s[n - 2] = prod * cos(u[n - 1]);
  s[n - 1] = prod * sin(u[n - 1]);
  return s;
}

Weight weight_from(const ModelSpec& spec) {
  const auto it = spec.params.find("N");
  if (it == spec.params.end()) return Weight::infinite();
  if (const auto* s = std::get_if<std::string>(&it->second)) {
    if (*s == "inf" || *s == "infinite" || *s == "infinity") return Weight::infinite();
    throw DomainError("model parameter N must be a positive number or \"inf\"");
  }
  return Weight::finite(std::get<double>(it->second));
}

int dimension(const ModelSpec& spec) {
  const double n = spec.number("n");
  if (n != std::round(n) || n < 2 || n > kMaxDim)
    throw DomainError("model parameter n must be an integer in [2, " + std::to_string(kMaxDim) + "]");
  return static_cast<int>(n);
}

Expr expr_param(const ModelSpec& spec, const std::string& key, const std::string& fallback,
                const std::map<std::string, double>& constants) {
  const auto it = spec.params.find(key);
  if (it == spec.params.end()) return Expr::parse(fallback, constants);
  if (const auto* d = std::get_if<double>(&it->second)) return Expr::constant(*d);
  return Expr::parse(std::get<std::string>(it->second), constants);
}

double positive(const ModelSpec& spec, const std::string& key, double fallback) {
  const double v = spec.number_or(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("model parameter " + key + " must be positive");
  return v;
}

Jet eval_radial(const Expr& e, const Jet& r) {
  Env env;
  env.bind(Var::r, r);
  env.bind(Var::rho, r);
  return e.eval(env);
}

BuiltModel euclidean(const ModelSpec& spec) {
  const int n = dimension(spec);
  const double radius = positive(spec, "radius", 1.0);
  BuiltModel m{Smms{cartesian_metric(n), DensityField::zero(n), weight_from(spec), BasePoint{ChartPoint::Zero(n), false}},
               sphere_embedding(n, radius, Vec::Zero(n)), {}};
  m.info.chart = ChartKind::cartesian;
  if (m.smms.weight.is_infinite()) {
    m.info.closed_forms["avr"] = 1.0;
    m.info.closed_forms["lhs"] = unit_sphere_area(n);
  }
  m.info.closed_forms["H_on_surface"] = (n - 1) / radius;
  return m;
}

BuiltModel gaussian_soliton(const ModelSpec& spec) {
  const int n = dimension(spec);
  const double lambda = positive(spec, "lambda", 1.0);
  const double radius = positive(spec, "radius", 1.0);
  if (spec.has("N")) throw DomainError("gaussian_soliton has N = inf; do not set N");
  DensityField f(n, [lambda](std::span<const Jet> x) {
    Jet s(0.0);
    for (const Jet& xi : x) s = s + square(xi);
    return (0.5 * lambda) * s;
  });
  BuiltModel m{Smms{cartesian_metric(n), f, Weight::infinite(), BasePoint{ChartPoint::Zero(n), false}},
               sphere_embedding(n, radius, Vec::Zero(n)), {}};
  m.info.closed_forms["bakry_emery_eigenvalue"] = lambda;
  m.info.closed_forms["total_weighted_volume"] = std::pow(2.0 * kPi / lambda, 0.5 * n);
  m.info.closed_forms["avr"] = 0.0;
  m.info.closed_forms["H_f_on_surface"] = (n - 1) / radius - lambda * radius;
  return m;
}

BuiltModel sphere_ambient(const ModelSpec& spec) {
  const int n = dimension(spec);
  const double a = positive(spec, "radius", 1.0);
  const double r0 = positive(spec, "r0", 0.25 * kPi * a);
  if (!(r0 < kPi * a)) throw DomainError("sphere_ambient: r0 must be below pi * radius");
  MetricField g = polar_warped_metric(n, [a](const Jet& r) { return a * sin(r * (1.0 / a)); }, 0.0, kPi * a);
  BuiltModel m{Smms{g, DensityField::zero(n), weight_from(spec), BasePoint{ChartPoint::Zero(n), true}},
               polar_sphere_embedding(n, r0), {}};
  m.info.chart = ChartKind::polar;
  m.info.chart_extent = kPi * a;
  m.info.closed_forms["ricci_eigenvalue"] = (n - 1) / (a * a);
  m.info.closed_forms["H_on_surface"] = (n - 1) / (a * std::tan(r0 / a));
  m.info.closed_forms["focal_r"] = kPi * a - r0;
  return m;
}

BuiltModel cone_power_density(const ModelSpec& spec) {
  const int n = dimension(spec);
  const double r0 = positive(spec, "r0", 1.0);
  if (!spec.has("N")) throw DomainError("cone_power_density requires a finite N");
  const Weight w = weight_from(spec);
  if (w.is_infinite()) throw DomainError("cone_power_density requires a finite N");
  const double N = w.value();
  DensityField f(n, [N, r0](std::span<const Jet> x) {
    if (radius_value(x) < 0.5 * r0) return Jet(cone_density_value(0.0, N, r0));
    return cone_density(radius_jet(x), N, r0);
  });
  BuiltModel m{Smms{cartesian_metric(n), f, w, BasePoint{ChartPoint::Zero(n), false}},
               sphere_embedding(n, r0, Vec::Zero(n)), {}};
  const double k = n + N;
  m.info.closed_forms["H_f_on_surface"] = (k - 1.0) / r0;
  m.info.closed_forms["lhs"] = unit_sphere_area(n) * std::pow(r0, -N);
  m.info.closed_forms["avr"] = unit_sphere_area(n) / (unit_sphere_area(k) * std::pow(r0, N));
  m.info.closed_forms["f_on_surface"] = 0.0;
  m.info.notes["exterior_density"] = "f = -N log(rho/r0) for rho >= r0";
  m.info.notes["cap"] =
      "f = N log 2 on [0, r0/2]; quintic Hermite blend on [r0/2, r0] matching value, slope and curvature at both ends";
  m.info.notes["hypotheses"] = "transverse Ric_f^N = -N/rho^2 < 0 outside r0; only equality of the two sides is expected";
  return m;
}

BuiltModel twisted_exterior(const ModelSpec& spec) {
  const int n = dimension(spec);
  const double a = positive(spec, "radius", 1.0);
  if (spec.has("N")) throw DomainError("twisted_exterior has N = inf; do not set N");
  const Expr H = expr_param(spec, "H", std::to_string(n - 1) + "/" + std::to_string(a), {});
  for (Var v : H.variables())
    if (v != Var::x1 && v != Var::x2 && v != Var::x3)
      throw DomainError("twisted_exterior: H may depend on x1, x2, x3 only");

  // Sample H over the link to reject nonpositive values and bound the chart.
  const auto eval_h = [n, H](std::span<const Jet> u) {
    const auto s = sphere_point(n, u);
    Env env;
    const Jet zero(0.0);
    env.bind(Var::x1, s[0]).bind(Var::x2, s[1]).bind(Var::x3, n >= 3 ? s[2] : zero);
    return H.eval(env);
  };
  double h_min = std::numeric_limits<double>::infinity(), h_max = 0.0;
  {
    const int na = 48, nb = 96;
    std::array<Jet, kMaxDim> u{};
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) {
        for (int d = 1; d < n - 1; ++d) u[d] = Jet(kPi * (i + 0.5) / na);
        u[n - 1] = Jet(2.0 * kPi * j / nb);
        const double h = eval_h(std::span<const Jet>(u.data(), n)).value();
        h_min = std::min(h_min, h);
        h_max = std::max(h_max, h);
      }
  }
  if (!(h_min > 0.0)) throw DomainError("twisted_exterior: H must be positive on the whole link");

  const double r_lo = -0.5 * (n - 1) / h_max;
  ChartDomain domain{polar_axes(n, r_lo, std::numeric_limits<double>::infinity())};
  MetricField g(n, domain, [n, a, eval_h](std::span<const Jet> u, std::span<Jet> up) {
    const Jet h = eval_h(u);
    const Jet scale = a * (1.0 + h * u[0] * (1.0 / (n - 1)));
    polar_components(n, u, scale, up);
  });
  // f = -(n-2) log H, constant along the normal rays.
  DensityField f(n, [n, eval_h](std::span<const Jet> u) { return -(n - 2.0) * log(eval_h(u)); });
  BuiltModel m{Smms{g, f, Weight::infinite(), std::nullopt}, polar_sphere_embedding(n, 0.0), {}};
  m.info.chart = ChartKind::exterior;
  m.info.closed_forms["H_min"] = h_min;
  m.info.closed_forms["H_max"] = h_max;
  if (H.variables().empty()) {
    const double h = H.eval(std::map<std::string, double>{});
    m.info.closed_forms["lhs"] =
        std::pow(h / (n - 1), n - 1) * std::pow(h, n - 2.0) * std::pow(a, n - 1) * unit_sphere_area(n);
  }
  m.info.notes["density_normalization"] = "f = -(n-2) log H(x), additive constant 0, independent of r";
  m.info.notes["hypotheses"] =
      "Ric_f(dr, dr) = 0 and Ric_f(dr, tangent) = 0; the tangential block is not sign-definite for nonconstant H";
  m.info.notes["interior"] = "the enclosed region is not part of the chart; its weighted volume is taken as 0";
  return m;
}

BuiltModel warped_custom(const ModelSpec& spec) {
  const int n = dimension(spec);
  const std::map<std::string, double> constants{{"n", static_cast<double>(n)}};
  const Expr w = expr_param(spec, "w", "r", constants);
  const Expr phi = expr_param(spec, "phi", "0", constants);
  const double r_min = spec.number_or("r_min", 0.0);
  const double r_max = spec.number_or("r_max", std::numeric_limits<double>::infinity());
  const double r0 = positive(spec, "r0", std::isfinite(r_max) ? 0.5 * (r_min + r_max) : r_min + 1.0);
  BuiltModel m{warped_product_smms(w, phi, n, weight_from(spec), r_min, r_max), polar_sphere_embedding(n, r0), {}};
  m.info.chart = ChartKind::polar;
  m.info.chart_extent = r_max;
  m.info.notes["profile"] = w.to_string();
  m.info.notes["density"] = phi.to_string();
  return m;
}

}  // namespace

double ModelSpec::number(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw DomainError("model '" + name + "' requires parameter " + key);
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  throw DomainError("model parameter " + key + " must be a number");
}

double ModelSpec::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

const std::vector<std::string>& model_parameters(const std::string& name) {
  static const std::map<std::string, std::vector<std::string>> table{
      {"euclidean", {"n", "radius", "N"}},
      {"gaussian_soliton", {"n", "lambda", "radius"}},
      {"sphere_ambient", {"n", "radius", "r0", "N"}},
      {"cone_power_density", {"n", "N", "r0"}},
      {"twisted_exterior", {"n", "radius", "H"}},
      {"warped_custom", {"n", "w", "phi", "r_min", "r_max", "r0", "N"}},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw DomainError("unknown model '" + name + "'");
  return it->second;
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"euclidean",          "gaussian_soliton", "sphere_ambient",
                                              "cone_power_density", "twisted_exterior", "warped_custom"};
  return names;
}

BuiltModel build_model(const ModelSpec& spec) {
  if (spec.name == "euclidean") return euclidean(spec);
  if (spec.name == "gaussian_soliton") return gaussian_soliton(spec);
  if (spec.name == "sphere_ambient") return sphere_ambient(spec);
  if (spec.name == "cone_power_density") return cone_power_density(spec);
  if (spec.name == "twisted_exterior") return twisted_exterior(spec);
  if (spec.name == "warped_custom") return warped_custom(spec);
  throw DomainError("unknown model '" + spec.name + "'");
}

MetricField polar_warped_metric(int n, std::function<Jet(const Jet&)> w, double r_min, double r_max) {
  if (n < 2 || n > kMaxDim) throw DomainError("polar_warped_metric: dimension out of range");
  if (!(r_max > r_min) || r_min < 0.0) throw DomainError("polar_warped_metric: need 0 <= r_min < r_max");
  return MetricField(n, ChartDomain{polar_axes(n, r_min, r_max)}, [n, w](std::span<const Jet> u, std::span<Jet> up) {
    polar_components(n, u, w(u[0]), up);
  });
}

Smms warped_product_smms(const Expr& profile_w, const Expr& density_phi, int n, const Weight& weight, double r_min,
                         double r_max) {
  for (const Expr* e : {&profile_w, &density_phi})
    for (Var v : e->variables())
      if (v != Var::r && v != Var::rho) throw DomainError("warped profile and density may depend on r only");
  if (!(r_max > r_min) || r_min < 0.0) throw DomainError("warped_product_smms: need 0 <= r_min < r_max");

  bool pole = false;
  if (r_min == 0.0) {
    const ExprValue w0 = eval_expr(profile_w, {{"r", 0.0}}, 1, "r");
    if (std::abs(w0.value) > 1e-12 || std::abs(w0.d1 - 1.0) > 1e-9)
      throw DomainError("warped profile must satisfy w(0) = 0 and w'(0) = 1 (or set r_min > 0)");
    pole = true;
  }
  // Positivity of the profile on the interior of the chart.
  const double hi = std::isfinite(r_max) ? r_max : r_min + 100.0;
  for (int i = 1; i < 2000; ++i) {
    const double r = r_min + (hi - r_min) * i / 2000.0;
    if (!(profile_w.eval(std::map<std::string, double>{{"r", r}}) > 0.0))
      throw DomainError("warped profile is not positive at r = " + std::to_string(r));
  }
  MetricField g = polar_warped_metric(n, [profile_w](const Jet& r) { return eval_radial(profile_w, r); }, r_min, r_max);
  DensityField f(n, [density_phi](std::span<const Jet> u) { return eval_radial(density_phi, u[0]); });
  Smms s{g, f, weight, std::nullopt};
  if (pole) s.base = BasePoint{ChartPoint::Zero(n), true};
  return s;
}

Jet cone_density(const Jet& rho, double N, double r0) {
  const double x = rho.value();
  const double a = 0.5 * r0, c = N * std::log(2.0);
  if (x >= r0) return -N * log(rho * (1.0 / r0));
  if (x <= a) return Jet(c);
  // Quintic Hermite on [a, r0]: (c, 0, 0) at a, (0, -N/r0, N/r0^2) at r0.
  const double h = r0 - a;
  const double p1 = -N / r0 * h, q1 = N / (r0 * r0) * h * h;
  const Jet s = (rho - a) * (1.0 / h);
  const Jet s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const Jet h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const Jet h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  const Jet h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const Jet h5 = 0.5 * (s3 - 2.0 * s4 + s5);
  return c * h0 + 0.0 * h3 + p1 * h4 + q1 * h5;
}

double cone_density_value(double rho, double N, double r0) { return cone_density(Jet(rho), N, r0).value(); }

}  // namespace smms
