// oqslab: run scenario files or built-in presets and write CSV/JSON outputs.
//
// Exit codes: 0 success, 1 some analysis reported an error block,
// 2 invalid scenario or arguments, 3 output could not be written.

#include "oqs/oqs.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::string out_dir;
  std::optional<double> tolerance;
  std::optional<double> grid_dt;
  std::optional<double> grid_tmax;

  void register_on(CLI::App &cmd) {
    cmd.add_option("--out-dir", out_dir, "Output directory (default: <[output] dir>/<name>)");
    cmd.add_option("--tolerance", tolerance, "Divisibility tolerance")->check(CLI::PositiveNumber);
    cmd.add_option("--grid-dt", grid_dt, "Main grid step")->check(CLI::PositiveNumber);
    cmd.add_option("--grid-tmax", grid_tmax, "Main grid end time");
  }

  void apply(oqs::Scenario &s) const {
    if (tolerance)
      s.divisibility.tolerance = *tolerance;
    if (grid_dt || grid_tmax)
      s.grid = oqs::TimeGrid::spanning(s.grid.t0, grid_tmax.value_or(s.grid.end()),
                                       grid_dt.value_or(s.grid.dt));
  }

  std::filesystem::path directory(const oqs::Scenario &s) const {
    if (!out_dir.empty())
      return out_dir;
    return std::filesystem::path(s.output.dir) / s.output.name;
  }
};

void print_summary(const oqs::RunResult &result, const std::filesystem::path &dir) {
  for (const auto &[name, block] : result.report["analyses"].items()) {
    std::cout << name << ": " << block["status"].get<std::string>();
    if (block["status"] == "error") {
      std::cout << " (" << block["error"]["type"].get<std::string>() << ": "
                << block["error"]["message"].get<std::string>() << ")";
    } else if (block["result"].contains("verdict")) {
      std::cout << ", verdict " << block["result"]["verdict"].get<std::string>();
    }
    std::cout << '\n';
  }
  std::cout << "outputs written to " << dir.string() << '\n';
}

int execute(oqs::Scenario scenario, const Overrides &overrides) {
  overrides.apply(scenario);
  const oqs::RunResult result = oqs::run_scenario(scenario);
  const std::filesystem::path dir = overrides.directory(scenario);
  try {
    oqs::write_outputs(result, dir);
  } catch (const oqs::IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  print_summary(result, dir);
  return result.exit_code();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Open-quantum-system divisibility and coherence analyses"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string preset_name;
  Overrides run_flags;
  Overrides preset_flags;

  CLI::App *run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_file, "Scenario file")->required();
  run_flags.register_on(*run);

  CLI::App *preset = app.add_subcommand("preset", "Run a built-in scenario");
  preset->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember({"dephasing", "jsquared", "counterexample"}));
  preset_flags.register_on(*preset);

  CLI::App *validate = app.add_subcommand("validate", "Parse and check a scenario file");
  validate->add_option("scenario", scenario_file, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run)
      return execute(oqs::load_scenario(scenario_file), run_flags);
    if (*preset)
      return execute(oqs::presets::load(preset_name), preset_flags);
    const oqs::Scenario s = oqs::load_scenario(scenario_file);
    std::cout << "ok: " << s.output.name << " (" << oqs::to_string(s.model.variant) << "), analyses:";
    for (oqs::Analysis a : s.analyses)
      std::cout << ' ' << oqs::to_string(a);
    std::cout << '\n';
    return 0;
  } catch (const oqs::ParseError &e) {
    std::cerr << scenario_file << ": " << e.what() << '\n';
    return 2;
  } catch (const oqs::IoError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const oqs::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
