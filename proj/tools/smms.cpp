// smms <scenario> --config <path> [--strict] [--out <path>] [--format json|csv|plotdata]
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "smms/error.hpp"
#include "smms/scenario.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification scenarios for smooth metric measure spaces"};
  std::string scenario, config_path, out_path, format;
  bool strict = false, permissive = false;
  app.add_option("scenario", scenario, "willmore-check | avr | comparison | certify | rigidity-model | tube-volume")
      ->required()
      ->check(CLI::IsMember(smms::scenario_names()));
  app.add_option("--config", config_path, "JSON scenario config")->required();
  app.add_flag("--strict", strict, "nonzero exit when a verdict fails (2, or 3 if hypotheses are not certified)");
  app.add_flag("--permissive", permissive, "ignore unknown config keys (listed as warnings)");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "json | csv | plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    smms::LoadOptions opts;
    opts.permissive = permissive;
    opts.scenario = scenario;
    const smms::ScenarioConfig cfg = smms::load_config_file(config_path, opts);
    const smms::ReportFormat fmt = smms::parse_format(format.empty() ? cfg.output.format : format);
    const std::string dest = out_path.empty() ? cfg.output.path.value_or("") : out_path;

    const smms::Report report = smms::run_scenario(cfg);
    const std::string bytes = smms::emit_report(report, fmt);
    if (dest.empty() || dest == "-") {
      std::cout << bytes;
      std::cout.flush();
    } else {
      std::ofstream out(dest, std::ios::binary);
      out << bytes;
      if (!out) throw smms::Error("cannot write report to '" + dest + "'");
    }
    for (const auto& v : report.verdicts)
      std::cerr << (v.holds ? "holds  " : "FAILS  ") << v.name << " (value " << v.value << ", tol " << v.tolerance
                << ")\n";
    if (!report.hypotheses_clean()) std::cerr << "hypotheses not certified on the samples\n";
    return report.exit_code(strict);
  } catch (const smms::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
