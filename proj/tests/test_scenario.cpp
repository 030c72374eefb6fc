#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smms/error.hpp"
#include "smms/scenario.hpp"

using namespace smms;
using doctest::Approx;
using nlohmann::json;

namespace {

const char* kFlatAvr = R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3},
                           "numerics": {"angular_orders": [8, 16]}})";

std::vector<std::vector<double>> csv_block(const std::string& text, const std::string& series, std::string* header) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line) && line != "# series," + series) {
  }
  std::getline(in, *header);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line) && !line.empty() && line[0] != '#') {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "smms_scenario_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SMMS_CLI_PATH) + " " + args + " >" + scratch("stdout").string() + " 2>" +
                          scratch("stderr").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("config loading") {
  SUBCASE("minimal document gets the defaults") {
    const ScenarioConfig c = load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3}})");
    CHECK(c.scenario == "avr");
    CHECK(c.numerics.radii == std::vector<double>{1, 2, 4, 8, 16});
    CHECK_FALSE(c.numerics.radii_given);
    CHECK(c.numerics.rtol == 1e-9);
    CHECK(c.output.format == "json");
    CHECK(std::get<double>(c.model.params.at("n")) == 3.0);
  }
  SUBCASE("parameters may sit under params") {
    const ScenarioConfig c =
        load_config_text(R"({"scenario": "avr", "model": {"name": "warped_custom", "params": {"n": 3, "w": "r"}}})");
    CHECK(std::get<std::string>(c.model.params.at("w")) == "r");
  }
  SUBCASE("unknown keys are named") {
    try {
      load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3}, "foo": 1})");
      FAIL("no throw");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("unknown key 'foo'") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3, "lambda": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3}, "numerics": {"rtoll": 1}})"),
        ConfigError);
  }
  SUBCASE("permissive mode records ignored keys") {
    LoadOptions o;
    o.permissive = true;
    const ScenarioConfig c =
        load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3}, "foo": 1})", o);
    REQUIRE(c.ignored_keys.size() == 1);
    CHECK(c.ignored_keys[0].find("foo") != std::string::npos);
  }
  SUBCASE("missing and malformed fields") {
    try {
      load_config_text(R"({"scenario": "willmore-check", "model": {"name": "euclidean", "n": 3}})");
      FAIL("no throw");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("requires field 'surface'") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_text("{"), ConfigError);
    CHECK_THROWS_AS(load_config_text("[]"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "avr"})"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "nope", "model": {"name": "euclidean", "n": 3}})"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "avr", "model": {"name": "nope"}})"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3},
                                         "numerics": {"radii": [2, 1, 3, 4]}})"),
                    ConfigError);
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3},
                                         "numerics": {"rtol": -1}})"),
                    ConfigError);
    CHECK_THROWS_AS(load_config_text(R"({"scenario": "avr", "model": {"name": "euclidean", "n": "three"}})"),
                    ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/smms.json"), ConfigError);
  }
  SUBCASE("command line scenario must agree") {
    LoadOptions o;
    o.scenario = "certify";
    CHECK_THROWS_AS(load_config_text(kFlatAvr, o), ConfigError);
    // and may supply it when the document does not
    const ScenarioConfig c = load_config_text(R"({"model": {"name": "euclidean", "n": 3}})", o);
    CHECK(c.scenario == "certify");
  }
  SUBCASE("every shipped config loads") {
    for (const auto& entry : std::filesystem::directory_iterator(SMMS_CONFIG_DIR)) {
      INFO(entry.path());
      CHECK_NOTHROW(load_config_file(entry.path().string()));
    }
  }
}

TEST_CASE("reports") {
  const Report rep = run_scenario(load_config_text(kFlatAvr));
  const json j = rep.to_json();
  CHECK(j.at("schema") == kReportSchema);
  CHECK(j.at("scenario") == "avr");
  CHECK(j.at("inputs").at("digest").get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(j.at("all_verdicts_hold") == true);
  CHECK(j.contains("timing"));
  CHECK_FALSE(rep.to_json(false).contains("timing"));
  CHECK(rep.exit_code(true) == 0);

  SUBCASE("json round-trips") {
    const std::string text = emit_report(rep, ReportFormat::json);
    const json back = json::parse(text);
    CHECK(back == j);
  }
  SUBCASE("csv: the flat Theta column is constant 1") {
    const std::string text = emit_report(rep, ReportFormat::csv);
    CHECK(text.rfind(std::string("# schema,") + kReportSchema, 0) == 0);
    std::string header;
    const auto rows = csv_block(text, "theta_f", &header);
    CHECK(header == "r,Theta_f,volume");
    REQUIRE(rows.size() == 5);
    for (const auto& row : rows) CHECK(row[1] == Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("plotdata has one block per curve") {
    const std::string text = emit_report(rep, ReportFormat::plotdata);
    CHECK(text.rfind(std::string("# schema ") + kReportSchema, 0) == 0);
    CHECK(text.find("# index 0: theta_f/Theta_f") != std::string::npos);
    CHECK(text.find("# index 1: theta_f/volume") != std::string::npos);
  }
  SUBCASE("same config, same bytes") {
    const Report again = run_scenario(load_config_text(kFlatAvr));
    CHECK(again.to_json(false).dump(2) == rep.to_json(false).dump(2));
    CHECK(emit_report(again, ReportFormat::csv) == emit_report(rep, ReportFormat::csv));
  }
  SUBCASE("digest ignores formatting but not values") {
    const Report spaced = run_scenario(load_config_text(
        R"({"numerics": {"angular_orders": [8, 16]},   "model": {"n": 3, "name": "euclidean"}, "scenario": "avr"})"));
    CHECK(spaced.digest == rep.digest);
    const Report other = run_scenario(load_config_text(
        R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3}, "numerics": {"angular_orders": [8, 18]}})"));
    CHECK(other.digest != rep.digest);
  }
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("comparison csv in the round three-sphere: m_f <= m0 row by row") {
  const Report rep = run_scenario(load_config_text(R"({"scenario": "comparison",
      "model": {"name": "sphere_ambient", "n": 3, "r0": 0.6},
      "surface": {"type": "canonical", "orders": [2, 4]},
      "numerics": {"r_max": 2.0, "grid_points": 101}})"));
  std::string header;
  const auto rows = csv_block(emit_report(rep, ReportFormat::csv), rep.series.at(0).name, &header);
  CHECK(header.rfind("r,m_f,m0", 0) == 0);
  REQUIRE(rows.size() > 10);
  for (const auto& row : rows) CHECK(row[1] <= row[2] + 1e-9);
  CHECK(rep.verdicts_hold());
}

TEST_CASE("scenario verdicts and exit codes") {
  SUBCASE("certification of the cone model is not clean") {
    const Report rep = run_scenario(load_config_file(std::string(SMMS_CONFIG_DIR) + "/certify_cone.json"));
    CHECK_FALSE(rep.hypotheses_clean());
    CHECK(rep.exit_code(false) == 0);
    CHECK(rep.exit_code(true) == 3);
  }
  SUBCASE("bad model parameters are config errors") {
    try {
      run_scenario(load_config_text(R"({"scenario": "avr", "model": {"name": "sphere_ambient", "n": 3,
                                        "r0": 10}})"));
      FAIL("no throw");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("model: sphere_ambient") != std::string::npos);
    }
  }
}

TEST_CASE("command line") {
  const std::string cfg = SMMS_CONFIG_DIR;
  CHECK(run_cli("willmore-check --config " + cfg + "/willmore_euclidean.json --strict") == 0);
  {
    const json j = json::parse(slurp(scratch("stdout")));
    CHECK(j.at("schema") == kReportSchema);
  }
  // Coarse quadrature on an oblate ellipsoid undershoots the left side while
  // flat space is clean: a plain verdict failure.
  const std::string coarse = write_file("coarse.json", R"({"scenario": "willmore-check",
      "model": {"name": "euclidean", "n": 3},
      "surface": {"type": "ellipsoid", "semi_axes": [1, 4, 4], "orders": [2, 2]},
      "numerics": {"angular_orders": [4, 8]}})");
  CHECK(run_cli("willmore-check --config " + coarse) == 0);
  CHECK(run_cli("willmore-check --config " + coarse + " --strict") == 2);
  CHECK(run_cli("certify --config " + cfg + "/certify_cone.json --strict") == 3);
  CHECK(run_cli("certify --config " + cfg + "/certify_cone.json") == 0);

  const std::string bad = write_file("bad.json", R"({"scenario": "avr", "model": {"name": "euclidean", "n": 3},
                                                     "foo": 1})");
  CHECK(run_cli("avr --config " + bad) == 4);
  CHECK(slurp(scratch("stderr")).find("unknown key 'foo'") != std::string::npos);
  CHECK(run_cli("avr --config " + bad + " --permissive --format csv") == 0);
  CHECK(run_cli("avr --config /nonexistent.json") == 4);
  CHECK(run_cli("avr") == 4);
  CHECK(run_cli("bogus --config " + bad) == 4);
  CHECK(run_cli("certify --config " + cfg + "/willmore_euclidean.json") == 4);

  SUBCASE("--out writes the file, SMMS_THREADS does not change the bytes") {
    const std::string avr = write_file("flat.json", kFlatAvr);
    const std::string a = scratch("a.csv").string(), b = scratch("b.csv").string();
    CHECK(run_cli("avr --config " + avr + " --format csv --out " + a) == 0);
    CHECK(run_cli("avr --config " + avr + " --format csv --out " + b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("# schema,", 0) == 0);
    const std::string c = scratch("c.csv").string();
    CHECK(std::system(("SMMS_THREADS=1 " + std::string(SMMS_CLI_PATH) + " avr --config " + avr +
                       " --format csv --out " + c + " 2>/dev/null")
                          .c_str()) == 0);
    CHECK(slurp(a) == slurp(c));
  }
}
