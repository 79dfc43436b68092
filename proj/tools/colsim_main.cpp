// colsim command-line runner: executes named scenarios from JSON configs and
// writes figure-ready CSV data (optionally with a gnuplot script).
//
// Exit codes: 0 success, 2 config error, 3 resource guard, 4 numerical
// validation failure, 1 anything else (I/O, internal).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <thread>

#include "colsim/scenarios.hpp"

namespace {

using namespace colsim;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ResourceGuardError*>(&e)) return 3;
  if (dynamic_cast<const PhysicalityError*>(&e)) return 4;
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  return 1;
}

struct OutputOptions {
  std::string output_dir = ".";
  std::string format = "csv";
  int workers = 0;

  EmitFormat emit_format() const {
    if (format == "csv") return EmitFormat::Csv;
    if (format == "plot-script") return EmitFormat::PlotScript;
    throw ConfigError("--format must be csv or plot-script");
  }

  int effective_workers() const {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--output-dir", opts.output_dir, "directory for emitted files");
  cmd->add_option("--format", opts.format, "csv | plot-script");
  cmd->add_option("--workers", opts.workers, "sweep worker threads (0 = hardware)");
}

std::string stem_for(const ScenarioConfig& config) {
  if (config.parameters.contains("output")) {
    const std::string stem = config.parameters.at("output").get<std::string>();
    if (!stem.empty()) return stem;
  }
  return config.scenario;
}

int cmd_run(const std::string& config_path, const OutputOptions& opts) {
  ScenarioConfig config = load_config_file(config_path);
  if (!config.sweep.empty())
    throw ConfigError("config declares a sweep; use the 'sweep' subcommand");
  ResultTable table = run_scenario(config);
  std::filesystem::create_directories(opts.output_dir);
  EmitResult files = emit(table, opts.emit_format(), opts.output_dir, stem_for(config));
  std::cout << "wrote " << files.csv_path.string() << " (" << table.rows.size() << " rows)\n";
  if (files.script_path) std::cout << "wrote " << files.script_path->string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const OutputOptions& opts) {
  ScenarioConfig config = load_config_file(config_path);
  std::vector<SweepOutcome> outcomes = run_sweep(config, opts.effective_workers());
  std::filesystem::create_directories(opts.output_dir);

  const std::string stem = stem_for(config);
  int failures = 0;
  for (const SweepOutcome& outcome : outcomes) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%03zu", outcome.index);
    std::cout << "point " << outcome.index;
    for (const auto& [key, value] : outcome.overrides)
      std::cout << " " << key << "=" << value.dump();
    if (outcome.table) {
      EmitResult files =
          emit(*outcome.table, opts.emit_format(), opts.output_dir, stem + suffix);
      std::cout << ": wrote " << files.csv_path.string() << "\n";
    } else {
      ++failures;
      std::cout << ": FAILED: " << outcome.error << "\n";
    }
  }
  if (failures > 0) {
    std::cout << failures << " of " << outcomes.size() << " sweep points failed\n";
    return 4;
  }
  return 0;
}

int cmd_list() {
  for (const ScenarioDef& def : scenario_catalog()) {
    std::cout << def.name << "  [" << def.model << ", " << def.target << "]\n";
    std::cout << "    " << def.description << "\n";
    for (const ParamSpec& spec : def.params) {
      if (spec.name == "output") continue;
      std::cout << "    " << std::left << std::setw(14) << spec.name << " default "
                << spec.default_value.dump() << "  " << spec.doc << "\n";
    }
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  ScenarioConfig config = load_config_file(config_path);
  const ScenarioDef& def = find_scenario(config.scenario);
  ResolvedParams params = resolve_parameters(def, config.parameters);

  // Validate every sweep point without running anything.
  std::size_t points = 1;
  std::vector<std::size_t> sizes;
  for (const auto& [name, values] : config.sweep) {
    bool known = false;
    for (const ParamSpec& spec : def.params) known = known || (spec.name == name);
    if (!known) throw ConfigError("sweep parameter '" + name + "' unknown for " + def.name);
    sizes.push_back(values.size());
    points *= values.size();
  }
  for (std::size_t index = 0; index < points; ++index) {
    Json point_params = config.parameters;
    std::size_t rest = index;
    for (std::size_t axis = 0; axis < config.sweep.size(); ++axis) {
      point_params[config.sweep[axis].first] = config.sweep[axis].second.at(rest % sizes[axis]);
      rest /= sizes[axis];
    }
    resolve_parameters(def, point_params);
  }

  std::cout << "config ok: scenario " << config.scenario << " (" << config.model << "), "
            << points << " point" << (points == 1 ? "" : "s") << "\n";
  std::cout << "resolved parameters: " << params.to_json_string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"colsim: collisional-model simulations with correlated ancillas"};
  app.require_subcommand(1);

  OutputOptions run_opts, sweep_opts;
  std::string run_config, sweep_config, validate_config;

  CLI::App* run = app.add_subcommand("run", "run one scenario from a JSON config");
  run->add_option("config", run_config, "path to the config file")->required();
  add_output_options(run, run_opts);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep from a JSON config");
  sweep->add_option("config", sweep_config, "path to the config file")->required();
  add_output_options(sweep, sweep_opts);

  CLI::App* list = app.add_subcommand("list-scenarios", "print the scenario catalog");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running anything");
  validate->add_option("config", validate_config, "path to the config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_opts);
    if (list->parsed()) return cmd_list();
    if (validate->parsed()) return cmd_validate(validate_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
