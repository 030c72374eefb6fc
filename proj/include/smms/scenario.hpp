#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "smms/certify.hpp"
#include "smms/models.hpp"

namespace smms {

inline constexpr const char* kReportSchema = "smms-report/1";

const std::vector<std::string>& scenario_names();

struct SurfaceSpec {
  std::string type = "canonical";  // canonical | sphere | ellipsoid
  std::optional<double> radius;
  std::vector<double> semi_axes;
  std::vector<double> center;
  double rotation_angle = 0.0;  // about the x3 axis (x1-x2 plane)
  std::vector<int> orders;      // empty: the embedding's own
  bool flip = false;
};

struct CertifySettings {
  int grid = 5;  // samples per chart axis
  std::optional<double> extent;
  std::vector<int> surface_orders{4, 8};
  double normal_r_max = 5.0;
  std::vector<int> radial_orders{4, 8};
  std::optional<double> radial_r_max;
  int points = 21;
  double tolerance = 1e-9;
};

struct Numerics {
  double rtol = 1e-9;
  double atol = 1e-12;
  double r_max = 10.0;
  int grid_points = 1001;
  std::vector<double> radii{1, 2, 4, 8, 16};
  bool radii_given = false;
  double eps_seed = 1e-4;
  bool seed_check = true;  // eps/2 repeat at polar poles
  std::vector<int> angular_orders{32, 64};
  std::vector<int> comparison_orders{4, 8};
  double tolerance = 1e-7;
  double gap_tolerance = 1e-6;
  double rigidity_tolerance = 1e-3;
  std::vector<double> tube_radii{0.5, 1, 2, 4, 8};
  std::optional<double> interior_volume;
  std::string avr_source = "auto";  // auto | ball | tube
  std::optional<std::string> mode;  // primary integrand mode
  CertifySettings certify;
};

struct OutputSpec {
  std::string format = "json";
  std::optional<std::string> path;
};

struct ScenarioConfig {
  std::string scenario;
  ModelSpec model;
  std::optional<SurfaceSpec> surface;
  Numerics numerics;
  OutputSpec output;
  // Keys ignored in permissive mode.
  std::vector<std::string> ignored_keys;

  // Canonical form (defaults filled), hashed into the report digest.
  nlohmann::json canonical() const;
};

struct LoadOptions {
  bool permissive = false;
  // Scenario from the command line; must agree with the document if both set.
  std::optional<std::string> scenario;
};

// Throws ConfigError (bad document, unknown key, missing field, range).
ScenarioConfig load_config_text(const std::string& text, const LoadOptions& opts = {});
ScenarioConfig load_config_file(const std::string& path, const LoadOptions& opts = {});

struct Verdict {
  std::string name;
  bool holds = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  nlohmann::json detail = nlohmann::json::object();
};

struct Series {
  std::string name;
  std::string x_label;
  std::vector<double> x;
  std::vector<std::pair<std::string, std::vector<double>>> columns;
};

struct Report {
  std::string scenario;
  std::string digest;
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  std::optional<CertificationReport> certification;
  std::vector<Series> series;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  bool verdicts_hold() const;
  bool hypotheses_clean() const { return !certification || certification->clean(); }
  // 0 unless strict; then 2 for a failed verdict, 3 when the hypotheses are
  // not clean (the inequality is not expected to hold).
  int exit_code(bool strict) const;
  nlohmann::json to_json(bool with_timing = true) const;
};

Report run_scenario(const ScenarioConfig& config);

enum class ReportFormat { json, csv, plotdata };
ReportFormat parse_format(const std::string& name);
std::string emit_report(const Report& report, ReportFormat format);

nlohmann::json certification_json(const CertificationReport& rep);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace smms
