#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smms/expr.hpp"
#include "smms/geometry.hpp"
#include "smms/hypersurface.hpp"

namespace smms {

// A parameter is a number or an expression source.
using ModelParam = std::variant<double, std::string>;

struct ModelSpec {
  std::string name;
  std::map<std::string, ModelParam> params;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  bool has(const std::string& key) const { return params.count(key) != 0; }
};

enum class ChartKind { cartesian, polar, exterior };

struct ModelInfo {
  ChartKind chart = ChartKind::cartesian;
  // Exact values known for the model (e.g. "lhs", "H_f_on_surface", "avr").
  std::map<std::string, double> closed_forms;
  std::map<std::string, std::string> notes;
  // Outer radius of the chart when it is bounded (sphere_ambient).
  double chart_extent = std::numeric_limits<double>::infinity();
};

struct BuiltModel {
  Smms smms;
  std::optional<Embedding> embedding;
  ModelInfo info;
};

const std::vector<std::string>& model_names();
// Parameter names accepted by a model; throws for unknown models.
const std::vector<std::string>& model_parameters(const std::string& name);
BuiltModel build_model(const ModelSpec& spec);

// Metric dr^2 + w(r)^2 g_{S^{n-1}} in a polar chart (r, theta_1..theta_{n-2},
// phi) with r in (r_min, r_max).
MetricField polar_warped_metric(int n, std::function<Jet(const Jet&)> w, double r_min = 0.0,
                                double r_max = std::numeric_limits<double>::infinity());

// Rotationally symmetric space with profile w(r) and density phi(r). When
// w(0) = 0 and w'(0) = 1 the pole is the base point.
Smms warped_product_smms(const Expr& profile_w, const Expr& density_phi, int n,
                         const Weight& weight = Weight::infinite(), double r_min = 0.0,
                         double r_max = std::numeric_limits<double>::infinity());

// Smooth cap used inside r0 by the cone model: f(rho) for all rho >= 0.
Jet cone_density(const Jet& rho, double N, double r0);
double cone_density_value(double rho, double N, double r0);

}  // namespace smms
