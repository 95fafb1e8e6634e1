// bclab command-line runner: configure, execute and summarize shrinking-
// target experiments.
//
//   bclab run <preset> [--config file] [--set section.key=value]...
//   bclab report <run-dir>
//   bclab list-presets
//   bclab validate-config <file>
//
// Exit codes: 0 all embedded checks pass, 1 any check fails, 2 bad
// configuration.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "bclab/experiment.hpp"
#include "bclab/io.hpp"

namespace {

int run_command(const std::string& preset_name, const std::string& config_file,
                const std::vector<std::string>& overrides) {
  bclab::ExperimentConfig cfg;
  if (!config_file.empty()) {
    cfg = bclab::ExperimentConfig::parse(bclab::read_text_file(config_file));
    if (!preset_name.empty() && preset_name != to_string(cfg.preset))
      throw bclab::ConfigError("preset argument conflicts with the config file's preset");
  } else {
    cfg = bclab::ExperimentConfig::preset_defaults(bclab::preset_from_string(preset_name));
  }
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw bclab::ConfigError("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();

  bclab::RunManifest manifest = bclab::run_experiment(cfg);
  std::cout << "run complete: " << manifest.files.size() << " files in "
            << manifest.output_dir << " (" << manifest.wall_clock_sec << " s)\n";
  for (const auto& c : manifest.checks) {
    std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << " = "
              << bclab::fmt_g17(c.value) << "  (" << c.requirement << ")\n";
  }
  return manifest.all_checks_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for shrinking-target hit statistics of interval maps"};
  app.require_subcommand(1);

  std::string preset_name, config_file, run_dir, validate_file;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "execute an experiment preset");
  run->add_option("preset", preset_name, "preset name (see list-presets)");
  run->add_option("--config", config_file, "config file (key = value sections)");
  run->add_option("--set", overrides, "override, e.g. --set run.ensemble=64")
      ->take_all();

  auto* rep = app.add_subcommand("report", "summarize a finished run directory");
  rep->add_option("dir", run_dir, "run output directory")->required();

  app.add_subcommand("list-presets", "list available presets");

  auto* val = app.add_subcommand("validate-config", "check a config file");
  val->add_option("file", validate_file, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      if (preset_name.empty() && config_file.empty())
        throw bclab::ConfigError("run: give a preset name or --config");
      return run_command(preset_name, config_file, overrides);
    }
    if (app.got_subcommand("report")) {
      bclab::ReportResult res = bclab::report(run_dir);
      std::cout << res.text;
      return res.ok ? 0 : 1;
    }
    if (app.got_subcommand("list-presets")) {
      for (bclab::Preset p : bclab::all_presets()) {
        std::cout << to_string(p) << "\n    " << bclab::preset_description(p) << "\n";
      }
      return 0;
    }
    if (app.got_subcommand("validate-config")) {
      auto cfg = bclab::ExperimentConfig::parse(bclab::read_text_file(validate_file));
      cfg.validate();
      std::cout << "ok (config " << cfg.hash() << ")\n";
      return 0;
    }
  } catch (const bclab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
