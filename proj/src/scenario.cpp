#include "smms/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "smms/comparison.hpp"
#include "smms/error.hpp"
#include "smms/parallel.hpp"
#include "smms/quadrature.hpp"
#include "smms/volume.hpp"

namespace smms {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- config

// Reads fields of one JSON object and remembers which keys were used.
class Fields {
 public:
  Fields(const json& j, std::string where, std::vector<std::string>* ignored, bool permissive)
      : j_(j), where_(std::move(where)), ignored_(ignored), permissive_(permissive) {
    if (!j.is_object()) throw ConfigError(where_ + " must be an object");
  }

  const json* get(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path(key) + " must be a number");
    return v->get<double>();
  }
  std::optional<double> optional_number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(path(key) + " must be a number");
    return v->get<double>();
  }
  int integer(const std::string& key, int fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(path(key) + " must be an integer");
    return v->get<int>();
  }
  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(path(key) + " must be true or false");
    return v->get<bool>();
  }
  std::optional<std::string> string(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(path(key) + " must be a string");
    return v->get<std::string>();
  }
  template <class T>
  std::optional<std::vector<T>> list(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ConfigError(path(key) + " must be an array");
    std::vector<T> out;
    for (const json& e : *v) {
      if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer()))
        throw ConfigError(path(key) + " must contain " + (std::is_integral_v<T> ? "integers" : "numbers"));
      out.push_back(e.get<T>());
    }
    return out;
  }

  // Unknown keys are errors unless permissive.
  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (used_.count(it.key())) continue;
      if (!permissive_) throw ConfigError("unknown key '" + path(it.key()) + "'");
      if (ignored_) ignored_->push_back(path(it.key()));
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string>* ignored_;
  bool permissive_;
  std::set<std::string> used_;
};

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive");
}

void require_increasing(const std::vector<double>& xs, const std::string& name) {
  if (xs.empty()) throw ConfigError(name + " must not be empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require_positive(xs[i], name);
    if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError(name + " must be strictly increasing");
  }
}

void require_orders(const std::vector<int>& xs, std::size_t size, const std::string& name) {
  if (size != 0 && xs.size() != size) throw ConfigError(name + " must have " + std::to_string(size) + " entries");
  for (int v : xs)
    if (v < 1 || v > 4096) throw ConfigError(name + " entries must be in [1, 4096]");
}

ModelSpec parse_model(const json& j, bool permissive, std::vector<std::string>& ignored) {
  if (!j.is_object()) throw ConfigError("model must be an object");
  Fields f(j, "model", &ignored, permissive);
  const auto name = f.string("name");
  if (!name) throw ConfigError("missing required field 'model.name'");
  ModelSpec spec{*name, {}};
  std::vector<std::string> allowed;
  try {
    allowed = model_parameters(*name);
  } catch (const DomainError&) {
    std::string list;
    for (const auto& m : model_names()) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("model.name '" + *name + "' is not one of: " + list);
  }
  // Parameters may sit directly in the model object or under "params".
  const json* nested = f.get("params");
  auto take = [&](Fields& src, const std::string& key) {
    const json* v = src.get(key);
    if (!v) return;
    if (v->is_number()) spec.params[key] = v->get<double>();
    else if (v->is_string() && (key == "w" || key == "phi" || key == "H" || key == "N"))
      spec.params[key] = v->get<std::string>();  // expressions, or N = "inf"
    else if (v->is_string()) throw ConfigError(src.path(key) + " must be a number");
    else throw ConfigError(src.path(key) + " must be a number or an expression string");
  };
  for (const auto& key : allowed) take(f, key);
  if (nested) {
    Fields p(*nested, "model.params", &ignored, permissive);
    for (const auto& key : allowed) {
      if (p.get(key) && spec.has(key)) throw ConfigError("model parameter " + key + " given twice");
      take(p, key);
    }
    p.finish();
  }
  f.finish();
  if (!spec.has("n")) throw ConfigError("missing required field 'model.n'");
  return spec;
}

SurfaceSpec parse_surface(const json& j, bool permissive, std::vector<std::string>& ignored) {
  Fields f(j, "surface", &ignored, permissive);
  SurfaceSpec s;
  s.type = f.string("type").value_or("canonical");
  if (s.type != "canonical" && s.type != "sphere" && s.type != "ellipsoid")
    throw ConfigError("surface.type must be canonical, sphere or ellipsoid");
  s.radius = f.optional_number("radius");
  if (s.radius) require_positive(*s.radius, "surface.radius");
  s.semi_axes = f.list<double>("semi_axes").value_or(std::vector<double>{});
  for (double a : s.semi_axes) require_positive(a, "surface.semi_axes");
  s.center = f.list<double>("center").value_or(std::vector<double>{});
  s.rotation_angle = f.number("rotation_angle", 0.0);
  s.orders = f.list<int>("orders").value_or(std::vector<int>{});
  require_orders(s.orders, 0, "surface.orders");
  s.flip = f.boolean("flip", false);
  if (s.type == "sphere" && !s.radius) throw ConfigError("missing required field 'surface.radius'");
  if (s.type == "ellipsoid" && s.semi_axes.empty()) throw ConfigError("missing required field 'surface.semi_axes'");
  f.finish();
  return s;
}

Numerics parse_numerics(const json* j, bool permissive, std::vector<std::string>& ignored) {
  Numerics n;
  if (!j) return n;
  Fields f(*j, "numerics", &ignored, permissive);
  n.rtol = f.number("rtol", n.rtol);
  n.atol = f.number("atol", n.atol);
  n.r_max = f.number("r_max", n.r_max);
  n.grid_points = f.integer("grid_points", n.grid_points);
  if (auto r = f.list<double>("radii")) {
    n.radii = *r;
    n.radii_given = true;
  }
  n.eps_seed = f.number("eps_seed", n.eps_seed);
  n.seed_check = f.boolean("seed_check", n.seed_check);
  n.angular_orders = f.list<int>("angular_orders").value_or(n.angular_orders);
  n.comparison_orders = f.list<int>("comparison_orders").value_or(n.comparison_orders);
  n.tolerance = f.number("tolerance", n.tolerance);
  n.gap_tolerance = f.number("gap_tolerance", n.gap_tolerance);
  n.rigidity_tolerance = f.number("rigidity_tolerance", n.rigidity_tolerance);
  n.tube_radii = f.list<double>("tube_radii").value_or(n.tube_radii);
  n.interior_volume = f.optional_number("interior_volume");
  n.avr_source = f.string("avr_source").value_or(n.avr_source);
  n.mode = f.string("mode");
  if (const json* c = f.get("certify")) {
    Fields cf(*c, "numerics.certify", &ignored, permissive);
    CertifySettings& s = n.certify;
    s.grid = cf.integer("grid", s.grid);
    s.extent = cf.optional_number("extent");
    s.surface_orders = cf.list<int>("surface_orders").value_or(s.surface_orders);
    s.normal_r_max = cf.number("normal_r_max", s.normal_r_max);
    s.radial_orders = cf.list<int>("radial_orders").value_or(s.radial_orders);
    s.radial_r_max = cf.optional_number("radial_r_max");
    s.points = cf.integer("points", s.points);
    s.tolerance = cf.number("tolerance", s.tolerance);
    cf.finish();
  }
  f.finish();

  for (auto [v, name] : {std::pair{n.rtol, "numerics.rtol"}, {n.atol, "numerics.atol"},
                         {n.tolerance, "numerics.tolerance"}, {n.gap_tolerance, "numerics.gap_tolerance"},
                         {n.rigidity_tolerance, "numerics.rigidity_tolerance"}, {n.r_max, "numerics.r_max"},
                         {n.eps_seed, "numerics.eps_seed"}, {n.certify.tolerance, "numerics.certify.tolerance"},
                         {n.certify.normal_r_max, "numerics.certify.normal_r_max"}})
    require_positive(v, name);
  if (n.certify.extent) require_positive(*n.certify.extent, "numerics.certify.extent");
  if (n.certify.radial_r_max) require_positive(*n.certify.radial_r_max, "numerics.certify.radial_r_max");
  if (n.interior_volume && !(*n.interior_volume >= 0.0)) throw ConfigError("numerics.interior_volume must be >= 0");
  if (n.grid_points < 2) throw ConfigError("numerics.grid_points must be >= 2");
  if (n.certify.grid < 1 || n.certify.grid > 64) throw ConfigError("numerics.certify.grid must be in [1, 64]");
  if (n.certify.points < 1) throw ConfigError("numerics.certify.points must be >= 1");
  require_increasing(n.radii, "numerics.radii");
  require_increasing(n.tube_radii, "numerics.tube_radii");
  require_orders(n.angular_orders, 2, "numerics.angular_orders");
  require_orders(n.comparison_orders, 0, "numerics.comparison_orders");
  require_orders(n.certify.surface_orders, 0, "numerics.certify.surface_orders");
  require_orders(n.certify.radial_orders, 2, "numerics.certify.radial_orders");
  if (n.avr_source != "auto" && n.avr_source != "ball" && n.avr_source != "tube")
    throw ConfigError("numerics.avr_source must be auto, ball or tube");
  if (n.mode) {
    try {
      parse_mode(*n.mode);
    } catch (const Error&) {
      throw ConfigError("numerics.mode must be absolute, positive_part or plain_power");
    }
  }
  return n;
}

json to_json(const ModelSpec& m) {
  json j = json::object();
  j["name"] = m.name;
  for (const auto& [k, v] : m.params) {
    if (const auto* d = std::get_if<double>(&v)) j[k] = *d;
    else j[k] = std::get<std::string>(v);
  }
  return j;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// ---------------------------------------------------------------- helpers

json point_json(const ChartPoint& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x(i));
  return a;
}

TransportOptions transport_options(const Numerics& n) {
  TransportOptions t;
  t.rtol = n.rtol;
  t.atol = n.atol;
  return t;
}

BallOptions ball_options(const Numerics& n) {
  BallOptions b;
  b.colatitude_order = n.angular_orders[0];
  b.azimuth_order = n.angular_orders[1];
  b.eps_seed = n.eps_seed;
  b.seed_check = n.seed_check;
  b.transport = transport_options(n);
  return b;
}

Mat rotation_about_x3(int n, double angle) {
  Mat r = Mat::Identity(n, n);
  if (angle == 0.0 || n < 2) return r;
  const double c = std::cos(angle), s = std::sin(angle);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

Embedding build_surface(const SurfaceSpec& spec, const BuiltModel& model) {
  const int n = model.smms.dim();
  Embedding emb = [&]() -> Embedding {
    if (spec.type == "canonical") {
      if (!model.embedding) throw ConfigError("surface.type canonical: the model has no canonical surface");
      return *model.embedding;
    }
    if (model.info.chart != ChartKind::cartesian) {
      if (spec.type != "sphere") throw ConfigError("surface.type ellipsoid needs a Cartesian model");
      if (!spec.center.empty() || spec.rotation_angle != 0.0)
        throw ConfigError("surface.center and rotation_angle need a Cartesian model");
      if (model.info.chart == ChartKind::exterior) throw ConfigError("surface.type sphere needs a model with a pole");
      return polar_sphere_embedding(n, *spec.radius);
    }
    Vec center = Vec::Zero(n);
    if (!spec.center.empty()) {
      if (static_cast<int>(spec.center.size()) != n) throw ConfigError("surface.center must have n entries");
      for (int i = 0; i < n; ++i) center(i) = spec.center[i];
    }
    const Mat rot = rotation_about_x3(n, spec.rotation_angle);
    if (spec.type == "sphere") return sphere_embedding(n, *spec.radius, center, 24, 48, rot);
    if (static_cast<int>(spec.semi_axes.size()) != n) throw ConfigError("surface.semi_axes must have n entries");
    Vec axes(n);
    for (int i = 0; i < n; ++i) axes(i) = spec.semi_axes[i];
    return ellipsoid_embedding(n, axes, center, rot);
  }();
  if (!spec.orders.empty()) {
    if (static_cast<int>(spec.orders.size()) != emb.param_dim())
      throw ConfigError("surface.orders must have " + std::to_string(emb.param_dim()) + " entries");
    emb = emb.with_orders(spec.orders);
  }
  if (spec.flip) emb = emb.flip();
  return emb;
}

// Orders sized for the surface's parameter count: the leading entries of
// `wanted`, padded with the last one.
std::vector<int> fit_orders(std::vector<int> wanted, int count) {
  if (wanted.empty()) wanted.push_back(4);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(wanted[std::min<std::size_t>(i, wanted.size() - 1)]);
  if (count == 1) out[0] = wanted.back();  // a closed curve has only the periodic axis
  return out;
}

double default_extent(const BuiltModel& model) {
  if (std::isfinite(model.info.chart_extent)) return 0.999 * model.info.chart_extent;
  return 4.0;
}

SamplePlan sample_plan(const BuiltModel& model, const Embedding* surface, const Numerics& num) {
  const CertifySettings& c = num.certify;
  const int n = model.smms.dim();
  const double extent = std::min(c.extent.value_or(default_extent(model)), default_extent(model) * 1.0);
  SamplePlan plan;
  plan.tolerance = c.tolerance;
  plan.eps_seed = num.eps_seed;
  plan.normal_r_max = c.normal_r_max;
  plan.normal_points = c.points;
  plan.radial_points = c.points;
  plan.radial_colatitude_order = c.radial_orders[0];
  plan.radial_azimuth_order = c.radial_orders[1];
  plan.radial_r_max = c.radial_r_max.value_or(std::isfinite(model.info.chart_extent) ? extent : 10.0);
  if (surface) plan.surface_orders = fit_orders(c.surface_orders, surface->param_dim());
  // Tensor grid, thinned so the sample count stays near 1000.
  int g = c.grid;
  while (g > 2 && std::pow(g, n) > 1000.0) --g;
  std::vector<int> idx(n, 0);
  const ChartDomain& dom = model.smms.metric.domain();
  for (;;) {
    ChartPoint x(n);
    for (int d = 0; d < n; ++d) {
      const double s = (idx[d] + 0.5) / g;
      if (model.info.chart == ChartKind::cartesian) {
        x(d) = g == 1 ? 0.5 * extent : extent * (2.0 * s - 1.0);
      } else if (d == 0) {
        // Exterior charts extend a little inside the surface; only r >= 0 is
        // part of the space.
        x(d) = std::max(dom.axes[0].lo, 0.0) + (extent - std::max(dom.axes[0].lo, 0.0)) * s;
      } else if (d < n - 1) {
        x(d) = kPi * s;
      } else {
        x(d) = 2.0 * kPi * idx[d] / g;
      }
    }
    plan.points.push_back(x);
    int d = 0;
    while (d < n && ++idx[d] == g) idx[d++] = 0;
    if (d == n) break;
  }
  return plan;
}

CertificationReport certify_model(const BuiltModel& model, const Embedding* surface, const Numerics& num) {
  return certify_hypotheses(model.smms, surface, sample_plan(model, surface, num));
}

void add_certification_warnings(Report& rep) {
  if (!rep.certification) return;
  for (const auto& flag : rep.certification->flags) rep.warnings.push_back("hypothesis: " + flag);
  if (!rep.certification->clean())
    rep.warnings.push_back("hypotheses not certified: the inequality is not expected to hold");
}

Verdict verdict_from(const ComparisonVerdict& v) {
  Verdict out{v.quantity, v.holds(), v.max_violation, v.tolerance, v.samples, json::object()};
  out.detail["witness"] = {{"x", point_json(v.witness.x)}, {"r", v.witness.r}, {"index", v.witness.index}};
  if (!v.hypothesis_flags.empty()) out.detail["hypothesis_flags"] = v.hypothesis_flags;
  return out;
}

json series_json(const ThetaSeries& s) {
  json j;
  j["radii"] = s.radii;
  j["theta"] = s.theta;
  j["volume"] = s.volume;
  j["monotone_ok"] = s.monotone_ok;
  j["monotone_tolerance"] = s.monotone_tolerance;
  j["max_increase"] = s.max_increase;
  j["max_increase_r"] = s.radii.empty() ? 0.0 : s.radii[s.max_increase_index];
  j["avr_upper"] = s.avr_upper;
  j["avr_extrapolated"] = s.avr_extrapolated;
  j["fit"] = {{"intercept", s.fit_intercept}, {"slope", s.fit_slope}, {"residual", s.fit_residual},
              {"points", s.fit_points}, {"model", "theta = a + b / r"}};
  j["k"] = s.k;
  j["seed_disagreement"] = s.seed_disagreement;
  return j;
}

Series theta_table(const ThetaSeries& s, const std::string& name) {
  return Series{name, "r", s.radii, {{"Theta_f", s.theta}, {"volume", s.volume}}};
}

bool has_base(const BuiltModel& m) { return m.smms.base.has_value(); }

// Interior volume of the region bounded by `emb`.
double region_volume(const BuiltModel& model, const Embedding& emb, const Numerics& num, std::vector<std::string>& warnings) {
  if (num.interior_volume) return *num.interior_volume;
  if (has_base(model)) return interior_volume(model.smms, *model.smms.base, emb, ball_options(num));
  if (model.info.notes.count("interior")) {
    warnings.push_back("interior volume: " + model.info.notes.at("interior"));
    return 0.0;
  }
  throw ConfigError("numerics.interior_volume is required: the model has no base point");
}

struct AvrResult {
  ThetaSeries series;
  std::string source;
};

AvrResult estimate_avr(const BuiltModel& model, const Numerics& num, const std::vector<double>& radii, bool clean,
                       std::vector<std::string>& warnings) {
  std::string source = num.avr_source;
  if (source == "auto") source = has_base(model) ? "ball" : "tube";
  if (source == "ball") {
    if (!has_base(model)) throw ConfigError("numerics.avr_source ball needs a model with a base point");
    return {avr_estimate(model.smms, *model.smms.base, radii, ball_options(num), clean), "ball"};
  }
  if (!model.embedding) throw ConfigError("tube AVR needs a model with a canonical surface");
  const Embedding& emb = *model.embedding;
  const double interior = region_volume(model, emb, num, warnings);
  ThetaSeries s = tube_theta_series(model.smms, emb, interior, radii, transport_options(num));
  // The tube quotient approaches the AVR only as r -> inf; same fit as balls.
  finish_series(s, clean);
  return {std::move(s), "tube"};
}

// ---------------------------------------------------------------- scenarios

void run_willmore(const ScenarioConfig& cfg, const BuiltModel& model, Report& rep) {
  const Embedding emb = build_surface(*cfg.surface, model);
  rep.certification = certify_model(model, &emb, cfg.numerics);
  const bool clean = rep.certification->clean();
  const IntegrandMode primary = cfg.numerics.mode ? parse_mode(*cfg.numerics.mode) : default_mode(model.smms.weight);

  const AvrResult avr = estimate_avr(model, cfg.numerics, cfg.numerics.radii, clean, rep.warnings);
  for (const auto& w : avr.series.warnings) rep.warnings.push_back("avr: " + w);
  const double k = model.smms.k();
  const double sphere = unit_sphere_area(k);
  const double rhs = sphere * avr.series.avr_extrapolated;
  rep.results["k"] = k;
  rep.results["avr"] = series_json(avr.series);
  rep.results["avr_source"] = avr.source;
  rep.results["rhs"] = rhs;
  rep.results["rhs_upper"] = sphere * avr.series.avr_upper;
  rep.results["sphere_area"] = sphere;
  rep.results["primary_mode"] = mode_name(primary);
  rep.series.push_back(theta_table(avr.series, "theta_f"));

  json modes = json::object();
  std::optional<WillmoreLhs> main;
  for (IntegrandMode mode : {IntegrandMode::absolute, IntegrandMode::positive_part, IntegrandMode::plain_power}) {
    json m;
    try {
      const WillmoreLhs lhs = willmore_lhs(emb, model.smms, mode);
      m["lhs"] = lhs.value;
      m["error"] = lhs.error;
      m["nodes"] = lhs.nodes;
      m["min_H_f"] = lhs.min_H_f;
      m["gap"] = willmore_gap(lhs.value, avr.series.avr_extrapolated, k);
      for (const auto& w : lhs.warnings) rep.warnings.push_back(mode_name(mode) + ": " + w);
      if (mode == primary) main = lhs;
    } catch (const DomainError& e) {
      m["lhs"] = nullptr;
      m["error_message"] = e.what();
      if (mode == primary) throw;
    }
    modes[mode_name(mode)] = m;
  }
  rep.results["modes"] = modes;
  rep.results["lhs"] = main->value;
  rep.results["lhs_error"] = main->error;
  rep.results["min_H_f"] = main->min_H_f;
  const double gap = willmore_gap(main->value, avr.series.avr_extrapolated, k);
  rep.results["gap"] = gap;
  const double tol = cfg.numerics.gap_tolerance * std::max(1.0, main->value);
  Verdict v{"willmore gap >= 0", gap >= -tol, gap, tol, main->nodes, json::object()};
  v.detail["mode"] = mode_name(primary);
  v.detail["lhs_error"] = main->error;
  rep.verdicts.push_back(v);
  for (const auto& [name, close] : model.info.closed_forms) rep.results["closed_forms"][name] = close;
}

void run_avr(const ScenarioConfig& cfg, const BuiltModel& model, Report& rep) {
  const Embedding* surface = model.embedding ? &*model.embedding : nullptr;
  rep.certification = certify_model(model, surface, cfg.numerics);
  const AvrResult avr = estimate_avr(model, cfg.numerics, cfg.numerics.radii, rep.certification->clean(), rep.warnings);
  for (const auto& w : avr.series.warnings) rep.warnings.push_back(w);
  rep.results["theta_series"] = series_json(avr.series);
  rep.results["avr_source"] = avr.source;
  rep.results["avr_upper"] = avr.series.avr_upper;
  rep.results["avr_extrapolated"] = avr.series.avr_extrapolated;
  rep.series.push_back(theta_table(avr.series, "theta_f"));
  rep.verdicts.push_back(Verdict{"Theta_f nonincreasing", avr.series.monotone_ok, avr.series.max_increase,
                                 avr.series.monotone_tolerance, avr.series.radii.size(),
                                 {{"r", avr.series.radii[avr.series.max_increase_index]}}});
  for (const auto& [name, close] : model.info.closed_forms) rep.results["closed_forms"][name] = close;
}

struct NodeRun {
  ShapeData shape;
  RadialTransport transport;
  ComparisonVerdict mean, theta, bound;
};

void run_comparison(const ScenarioConfig& cfg, const BuiltModel& model, Report& rep) {
  const Embedding full = build_surface(*cfg.surface, model);
  rep.certification = certify_model(model, &full, cfg.numerics);
  const Embedding emb = full.with_orders(fit_orders(cfg.numerics.comparison_orders, full.param_dim()));
  const SurfaceNodes nodes = surface_nodes(emb);
  const double k = model.smms.k(), tol = cfg.numerics.tolerance;
  std::vector<NodeRun> runs(nodes.params.size());
  parallel_for(runs.size(), [&](std::size_t i) {
    NodeRun& run = runs[i];
    run.shape = shape_data(emb, model.smms, nodes.params[i]);
    run.transport = radial_transport(model.smms, run.shape.transport_start(), cfg.numerics.r_max,
                                     cfg.numerics.grid_points, transport_options(cfg.numerics));
    run.mean = compare_mean_curvature(run.transport, run.shape.H_f, k, tol);
    run.theta = check_theta_monotone(run.transport, tol);
    run.bound = check_volume_element_bound(run.transport, run.shape.H_f, k, run.shape.f_at, tol);
  });

  json per_node = json::array();
  std::size_t worst = 0;
  ComparisonVerdict agg[3];
  std::optional<double> min_focal;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const NodeRun& run = runs[i];
    const ComparisonVerdict* vs[3] = {&run.mean, &run.theta, &run.bound};
    json node{{"index", i},
              {"x", point_json(run.shape.x)},
              {"H", run.shape.H},
              {"H_f", run.shape.H_f},
              {"focal_r", opt(run.transport.focal_r)},
              {"grid_points", run.transport.size()}};
    for (int q = 0; q < 3; ++q) {
      node["verdicts"][vs[q]->quantity] = {{"max_violation", vs[q]->max_violation}, {"holds", vs[q]->holds()}};
      if (i == 0 || vs[q]->max_violation > agg[q].max_violation) {
        agg[q] = *vs[q];
        agg[q].witness.index = i;  // node index; the radius stays in witness.r
      }
      agg[q].samples = i == 0 ? vs[q]->samples : agg[q].samples;
    }
    if (run.mean.max_violation > runs[worst].mean.max_violation) worst = i;
    if (run.transport.focal_r) min_focal = std::min(min_focal.value_or(*run.transport.focal_r), *run.transport.focal_r);
    per_node.push_back(node);
  }
  std::size_t total = 0;
  for (int q = 0; q < 3; ++q) {
    total = 0;
    for (const NodeRun& run : runs) total += (q == 0 ? run.mean : q == 1 ? run.theta : run.bound).samples;
    agg[q].samples = total;
    Verdict v = verdict_from(agg[q]);
    v.detail["node"] = agg[q].witness.index;
    rep.verdicts.push_back(v);
  }
  rep.results["nodes"] = per_node;
  rep.results["node_count"] = runs.size();
  rep.results["r_max"] = cfg.numerics.r_max;
  rep.results["grid_points"] = cfg.numerics.grid_points;
  rep.results["min_focal_r"] = opt(min_focal);
  rep.results["k"] = k;
  rep.results["series_node"] = worst;

  const NodeRun& run = runs[worst];
  Series s{"comparison", "r", run.transport.r, {}};
  std::vector<double> m0, bound;
  const double w = std::exp(-run.shape.f_at);
  for (double r : run.transport.r) {
    const double base = 1.0 + run.shape.H_f * r / (k - 1.0);
    m0.push_back(k - 1.0 + run.shape.H_f * r > 0.0 ? model_mean_curvature(run.shape.H_f, k, r) : std::nan(""));
    bound.push_back(base > 0.0 ? w * std::pow(base, k - 1.0) : 0.0);
  }
  s.columns = {{"m_f", run.transport.m_f}, {"m0", m0},          {"theta", run.transport.theta},
               {"A_f", run.transport.A_f}, {"bound", bound}, {"m", run.transport.m}};
  rep.series.push_back(std::move(s));
}

void run_certify(const ScenarioConfig& cfg, const BuiltModel& model, Report& rep) {
  std::optional<Embedding> emb;
  if (cfg.surface) emb = build_surface(*cfg.surface, model);
  else if (model.embedding) emb = model.embedding;
  rep.certification = certify_model(model, emb ? &*emb : nullptr, cfg.numerics);
  const CertificationReport& c = *rep.certification;
  rep.results["sample_points"] = c.bakry_emery.samples;
  rep.results["min_eigenvalue"] = c.bakry_emery.minimum;
  for (const auto& [name, close] : model.info.closed_forms) rep.results["closed_forms"][name] = close;
  rep.verdicts.push_back(Verdict{"hypotheses certified", c.clean(), c.bakry_emery.minimum, c.tolerance,
                                 c.bakry_emery.samples, {{"note", c.note}}});
}

void run_rigidity(const ScenarioConfig& cfg, const BuiltModel& model, Report& rep) {
  const bool cone = model.smms.base.has_value() && cfg.model.name == "cone_power_density";
  if (cfg.model.name != "cone_power_density" && cfg.model.name != "twisted_exterior")
    throw ConfigError("rigidity-model needs model cone_power_density or twisted_exterior");
  const Embedding emb = cfg.surface ? build_surface(*cfg.surface, model) : *model.embedding;
  rep.certification = certify_model(model, &emb, cfg.numerics);
  Numerics num = cfg.numerics;
  if (!num.radii_given) num.radii = {62.5, 125, 250, 500, 1000};
  num.avr_source = cone ? "ball" : "tube";
  const IntegrandMode mode = cone ? IntegrandMode::absolute : IntegrandMode::plain_power;

  const WillmoreLhs lhs = willmore_lhs(emb, model.smms, mode);
  const AvrResult avr = estimate_avr(model, num, num.radii, false, rep.warnings);
  const double k = model.smms.k();
  const double rhs = unit_sphere_area(k) * avr.series.avr_extrapolated;
  const double gap = lhs.value - rhs;
  const double rel = gap / std::max(std::abs(lhs.value), 1e-300);
  rep.results["lhs"] = lhs.value;
  rep.results["lhs_error"] = lhs.error;
  rep.results["mode"] = mode_name(mode);
  rep.results["rhs"] = rhs;
  rep.results["gap"] = gap;
  rep.results["relative_gap"] = rel;
  rep.results["avr"] = series_json(avr.series);
  rep.results["avr_source"] = avr.source;
  rep.results["k"] = k;
  for (const auto& [name, close] : model.info.closed_forms) rep.results["closed_forms"][name] = close;
  rep.series.push_back(theta_table(avr.series, "theta_f"));
  rep.verdicts.push_back(Verdict{"|gap| / lhs <= rigidity tolerance", std::abs(rel) <= num.rigidity_tolerance, rel,
                                 num.rigidity_tolerance, lhs.nodes, {{"avr_source", avr.source}}});

  // theta(r) = e^{-f(x)} along every normal ray is the equality signature.
  const Embedding coarse = emb.with_orders(fit_orders(num.comparison_orders, emb.param_dim()));
  const SurfaceNodes nodes = surface_nodes(coarse);
  const double r_max = num.radii.back();
  std::vector<double> dev(nodes.params.size());
  std::vector<RadialTransport> runs(nodes.params.size());
  parallel_for(dev.size(), [&](std::size_t i) {
    const ShapeData sd = shape_data(coarse, model.smms, nodes.params[i]);
    runs[i] = radial_transport(model.smms, sd.transport_start(), r_max, num.grid_points, transport_options(num));
    const double target = std::exp(-sd.f_at);
    double worst = 0.0;
    for (double t : runs[i].theta) worst = std::max(worst, std::abs(t - target) / std::max(1.0, target));
    if (runs[i].focal_r || runs[i].r.back() < r_max) worst = std::numeric_limits<double>::infinity();
    dev[i] = worst;
  });
  const auto it = std::max_element(dev.begin(), dev.end());
  const std::size_t worst = static_cast<std::size_t>(it - dev.begin());
  rep.results["theta_signature"] = {{"max_deviation", *it}, {"r_max", r_max}, {"nodes", dev.size()},
                                    {"grid_points", num.grid_points}};
  rep.verdicts.push_back(Verdict{"theta constant at exp(-f)", *it <= num.tolerance, *it, num.tolerance,
                                 dev.size() * static_cast<std::size_t>(num.grid_points), {{"node", worst}}});
  rep.series.push_back(Series{"theta_signature", "r", runs[worst].r, {{"theta", runs[worst].theta}}});
}

void run_tube(const ScenarioConfig& cfg, const BuiltModel& model, Report& rep) {
  const Embedding emb = build_surface(*cfg.surface, model);
  rep.certification = certify_model(model, &emb, cfg.numerics);
  const bool clean = rep.certification->clean();
  const Numerics& num = cfg.numerics;
  const double k = model.smms.k();
  const double interior = region_volume(model, emb, num, rep.warnings);
  const TubeVolumes tube = tube_volumes(model.smms, emb, interior, num.tube_radii, transport_options(num));

  // Chain bound: interior + sum over nodes of e^{-f} int_0^R (1 + H_f r/(k-1))_+^{k-1} dr.
  const SurfaceNodes nodes = surface_nodes(emb);
  std::vector<ShapeData> sd(nodes.params.size());
  parallel_for(sd.size(), [&](std::size_t i) { sd[i] = shape_data(emb, model.smms, nodes.params[i]); });
  std::vector<double> chain, leading;
  const WillmoreLhs lhs = willmore_lhs(emb, model.smms, IntegrandMode::positive_part);
  for (double R : num.tube_radii) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sd.size(); ++i) {
      const double h = sd[i].H_f / (k - 1.0);
      double radial;
      if (h == 0.0) {
        radial = R;
      } else {
        const double end = std::max(0.0, 1.0 + h * R);
        radial = (std::pow(end, k) - 1.0) / (k * h);  // also right for h < 0 once the base hits 0
      }
      sum += nodes.weights[i] * sd[i].area_weight * std::exp(-sd[i].f_at) * radial;
    }
    chain.push_back(interior + sum);
    leading.push_back(std::pow(R, k) / k * lhs.value);
  }
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_i = 0;
  std::vector<double> ratio;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double v = (tube.volume[i] - chain[i]) / std::max(1.0, chain[i]);
    if (v > worst) worst = v, worst_i = i;
    ratio.push_back(tube.volume[i] / leading[i]);
  }
  rep.results["radii"] = num.tube_radii;
  rep.results["tube_volume"] = tube.volume;
  rep.results["interior_volume"] = interior;
  rep.results["chain_bound"] = chain;
  rep.results["leading_term"] = leading;
  rep.results["leading_ratio"] = ratio;
  rep.results["lhs_positive_part"] = lhs.value;
  rep.results["focal_nodes"] = tube.focal_nodes;
  rep.results["min_focal_r"] = opt(tube.min_focal_r);
  rep.results["nodes"] = tube.nodes;
  rep.results["k"] = k;
  Verdict chain_v{"tube volume <= chain bound", worst <= num.tolerance, worst, num.tolerance, chain.size(),
                  {{"R", num.tube_radii[worst_i]}}};
  if (!clean) chain_v.detail["note"] = "bound assumes certified hypotheses";
  rep.verdicts.push_back(chain_v);

  Series s{"tube_volume", "R", num.tube_radii, {{"tube", tube.volume}, {"chain_bound", chain}, {"leading", leading}}};
  // Balls about an interior base point sit inside the tube.
  if (has_base(model) && emb.level && emb.level(model.smms.base->point) < 0.0) {
    std::vector<double> ball_radii;
    for (double R : num.tube_radii) ball_radii.push_back(R);
    const BallVolumes balls = weighted_ball_volumes(model.smms, *model.smms.base, ball_radii, ball_options(num));
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < balls.volume.size(); ++i)
      excess = std::max(excess, (balls.volume[i] - tube.volume[i]) / std::max(1.0, tube.volume[i]));
    rep.results["ball_volume"] = balls.volume;
    rep.verdicts.push_back(Verdict{"ball volume <= tube volume", excess <= num.tolerance, excess, num.tolerance,
                                   balls.volume.size(), json::object()});
    s.columns.push_back({"ball", balls.volume});
  }
  rep.series.push_back(std::move(s));
}

// Rethrows library errors with the scenario name, keeping the error kind.
template <class F>
void with_context(const std::string& scenario, F&& body) {
  const std::string prefix = "scenario " + scenario + ": ";
  try {
    body();
  } catch (const ConfigError&) {
    throw;
  } catch (const ParseError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  }
}

std::string number_text(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flattens scalar results into (path, value) rows.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_number()) {
    out.emplace_back(prefix, number_text(j.get<double>()));
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? "true" : "false");
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else if (j.is_null()) {
    out.emplace_back(prefix, "nan");
  }
  // arrays are emitted as series
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

// ---------------------------------------------------------------- public

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"willmore-check", "avr",           "comparison",
                                              "certify",        "rigidity-model", "tube-volume"};
  return names;
}

json ScenarioConfig::canonical() const {
  json j;
  j["scenario"] = scenario;
  j["model"] = to_json(model);
  if (surface) {
    const SurfaceSpec& s = *surface;
    j["surface"] = {{"type", s.type},     {"radius", opt(s.radius)}, {"semi_axes", s.semi_axes},
                    {"center", s.center}, {"rotation_angle", s.rotation_angle},
                    {"orders", s.orders}, {"flip", s.flip}};
  } else {
    j["surface"] = nullptr;
  }
  const Numerics& n = numerics;
  const CertifySettings& c = n.certify;
  j["numerics"] = {{"rtol", n.rtol},
                   {"atol", n.atol},
                   {"r_max", n.r_max},
                   {"grid_points", n.grid_points},
                   {"radii", n.radii},
                   {"eps_seed", n.eps_seed},
                   {"seed_check", n.seed_check},
                   {"angular_orders", n.angular_orders},
                   {"comparison_orders", n.comparison_orders},
                   {"tolerance", n.tolerance},
                   {"gap_tolerance", n.gap_tolerance},
                   {"rigidity_tolerance", n.rigidity_tolerance},
                   {"tube_radii", n.tube_radii},
                   {"interior_volume", opt(n.interior_volume)},
                   {"avr_source", n.avr_source},
                   {"mode", opt(n.mode)},
                   {"certify",
                    {{"grid", c.grid},
                     {"extent", opt(c.extent)},
                     {"surface_orders", c.surface_orders},
                     {"normal_r_max", c.normal_r_max},
                     {"radial_orders", c.radial_orders},
                     {"radial_r_max", opt(c.radial_r_max)},
                     {"points", c.points},
                     {"tolerance", c.tolerance}}}};
  return j;
}

ScenarioConfig load_config_text(const std::string& text, const LoadOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig cfg;
  Fields top(doc, "", &cfg.ignored_keys, opts.permissive);
  if (top.get("schema")) {
    // Optional self-description; accepted but not interpreted.
  }
  const auto scenario = top.string("scenario");
  if (scenario && opts.scenario && *scenario != *opts.scenario)
    throw ConfigError("scenario '" + *opts.scenario + "' does not match the config's '" + *scenario + "'");
  if (!scenario && !opts.scenario) throw ConfigError("missing required field 'scenario'");
  cfg.scenario = opts.scenario ? *opts.scenario : *scenario;
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), cfg.scenario) == names.end())
    throw ConfigError("unknown scenario '" + cfg.scenario + "'");

  const json* model = top.get("model");
  if (!model) throw ConfigError("missing required field 'model'");
  cfg.model = parse_model(*model, opts.permissive, cfg.ignored_keys);
  if (const json* s = top.get("surface")) cfg.surface = parse_surface(*s, opts.permissive, cfg.ignored_keys);
  cfg.numerics = parse_numerics(top.get("numerics"), opts.permissive, cfg.ignored_keys);
  if (const json* o = top.get("output")) {
    Fields of(*o, "output", &cfg.ignored_keys, opts.permissive);
    cfg.output.format = of.string("format").value_or("json");
    cfg.output.path = of.string("path");
    of.finish();
    try {
      parse_format(cfg.output.format);
    } catch (const Error&) {
      throw ConfigError("output.format must be json, csv or plotdata");
    }
  }
  top.finish();

  if (!cfg.surface && (cfg.scenario == "willmore-check" || cfg.scenario == "comparison" || cfg.scenario == "tube-volume"))
    throw ConfigError("scenario " + cfg.scenario + " requires field 'surface'");
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), opts);
}

bool Report::verdicts_hold() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.holds; });
}

int Report::exit_code(bool strict) const {
  if (!strict || verdicts_hold()) return 0;
  return hypotheses_clean() ? 2 : 3;
}

json certification_json(const CertificationReport& rep) {
  json j;
  for (const CertifiedMinimum* c : {&rep.bakry_emery, &rep.df_dr, &rep.df_drho, &rep.H_f}) {
    json e{{"name", c->name}, {"checked", c->checked}, {"required", c->required}, {"samples", c->samples}};
    if (c->checked) {
      e["minimum"] = c->minimum;
      e["witness"] = point_json(c->witness);
      e["witness_r"] = c->witness_r;
      e["ok"] = c->ok(rep.tolerance);
    }
    const std::string key = c == &rep.bakry_emery ? "bakry_emery" : c == &rep.df_dr ? "df_dr"
                            : c == &rep.df_drho    ? "df_drho"
                                                   : "H_f";
    j[key] = e;
  }
  j["tolerance"] = rep.tolerance;
  j["clean"] = rep.clean();
  j["real_weight_extension"] = rep.real_weight;
  j["flags"] = rep.flags;
  j["note"] = rep.note;
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// NaN and inf have no JSON spelling; make the in-memory document match what
// dump() writes.
void null_nonfinite(json& j) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) j = nullptr;
  } else if (j.is_structured()) {
    for (auto& v : j) null_nonfinite(v);
  }
}

json Report::to_json(bool with_timing) const {
  json j;
  j["schema"] = kReportSchema;
  j["scenario"] = scenario;
  j["inputs"] = {{"digest", digest}, {"config", config}};
  j["results"] = results;
  json vs = json::array();
  for (const Verdict& v : verdicts)
    vs.push_back({{"name", v.name},
                  {"holds", v.holds},
                  {"value", v.value},
                  {"tolerance", v.tolerance},
                  {"samples", v.samples},
                  {"detail", v.detail}});
  j["verdicts"] = vs;
  j["all_verdicts_hold"] = verdicts_hold();
  j["hypotheses"] = certification ? certification_json(*certification) : json(nullptr);
  json ss = json::object();
  for (const Series& s : series) {
    json cols = json::object();
    for (const auto& [name, values] : s.columns) cols[name] = values;
    ss[s.name] = {{"x_label", s.x_label}, {"x", s.x}, {"columns", cols}};
  }
  j["series"] = ss;
  j["warnings"] = warnings;
  if (with_timing) j["timing"] = {{"seconds", seconds}, {"threads", worker_count()}};
  null_nonfinite(j);
  return j;
}

Report run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.scenario = config.scenario;
  rep.config = config.canonical();
  rep.digest = "fnv1a64:" + fnv1a_hex(rep.config.dump());
  for (const auto& key : config.ignored_keys) rep.warnings.push_back("ignored unknown key '" + key + "'");
  with_context(config.scenario, [&] {
    BuiltModel model = [&] {
      try {
        return build_model(config.model);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("model: ") + e.what());
      } catch (const ParseError& e) {
        throw ConfigError(std::string("model: ") + e.what());
      }
    }();
    rep.results["model_notes"] = model.info.notes;
    rep.results["weight_N"] = model.smms.weight.is_infinite() ? json("inf") : json(model.smms.weight.value());
    if (!model.smms.weight.is_infinite() && !model.smms.weight.is_integer())
      rep.warnings.push_back("non-integer N: real-weight extension");
    const std::string& s = config.scenario;
    if (s == "willmore-check") run_willmore(config, model, rep);
    else if (s == "avr") run_avr(config, model, rep);
    else if (s == "comparison") run_comparison(config, model, rep);
    else if (s == "certify") run_certify(config, model, rep);
    else if (s == "rigidity-model") run_rigidity(config, model, rep);
    else run_tube(config, model, rep);
  });
  add_certification_warnings(rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "plotdata") return ReportFormat::plotdata;
  throw ConfigError("unknown format '" + name + "' (json, csv, plotdata)");
}

std::string emit_report(const Report& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::json) {
    out << report.to_json().dump(2) << "\n";
    return out.str();
  }
  if (format == ReportFormat::csv) {
    out << "# schema," << kReportSchema << "\n# scenario," << report.scenario << "\n# digest," << report.digest
        << "\n";
    out << "# summary\nkey,value\n";
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report.results, "", rows);
    for (const Verdict& v : report.verdicts) {
      rows.emplace_back("verdict." + v.name + ".holds", v.holds ? "true" : "false");
      rows.emplace_back("verdict." + v.name + ".value", number_text(v.value));
      rows.emplace_back("verdict." + v.name + ".tolerance", number_text(v.tolerance));
    }
    rows.emplace_back("hypotheses_clean", report.hypotheses_clean() ? "true" : "false");
    for (const auto& [k, v] : rows) out << csv_field(k) << "," << csv_field(v) << "\n";
    for (const Series& s : report.series) {
      out << "\n# series," << s.name << "\n" << csv_field(s.x_label);
      for (const auto& c : s.columns) out << "," << csv_field(c.first);
      out << "\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << number_text(s.x[i]);
        for (const auto& c : s.columns) out << "," << (i < c.second.size() ? number_text(c.second[i]) : "nan");
        out << "\n";
      }
    }
    return out.str();
  }
  // plotdata: one two-column block per named curve, blank-line separated
  // (gnuplot "index" blocks).
  out << "# schema " << kReportSchema << "\n# scenario " << report.scenario << "\n";
  int index = 0;
  for (const Series& s : report.series)
    for (const auto& [name, values] : s.columns) {
      out << "\n\n# index " << index++ << ": " << s.name << "/" << name << "\n# " << s.x_label << " " << name << "\n";
      for (std::size_t i = 0; i < s.x.size() && i < values.size(); ++i)
        out << number_text(s.x[i]) << " " << number_text(values[i]) << "\n";
    }
  return out.str();
}

}  // namespace smms
