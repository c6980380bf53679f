// blochwalk: run experiment configs, built-in presets and parameter sweeps.
//
//   blochwalk run --config exp.json [--out DIR] [--quiet]
//   blochwalk preset fig8-top [--out DIR]
//   blochwalk sweep --config exp.json --axis phi --values 2pi/20,2pi/40 [--out DIR]
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 no-wrap violation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blochwalk/experiment.hpp"
#include "presets.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNoWrap = 3;

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BLOCHWALK_OUT"); env && *env) return env;
  return "blochwalk_out";
}

void report(const blochwalk::ExperimentReport& r, bool quiet) {
  if (quiet) return;
  for (const auto& run : r.manifest["runs"]) {
    std::string line = r.directory.string();
    if (run["directory"] != ".") line += "/" + run["directory"].get<std::string>();
    std::printf("%s: N=%d, %zu artifact(s)", line.c_str(), run["n_sites"].get<int>(),
                run["artifacts"].size());
    if (run.contains("max_hellinger"))
      std::printf(", max Hellinger %.6g", run["max_hellinger"].get<double>());
    std::printf("\n");
    for (const auto& w : run["warnings"]) std::printf("  warning: %s\n", w.get<std::string>().c_str());
  }
}

void run_document(const blochwalk::json& doc, const fs::path& out, bool quiet) {
  for (const auto& cfg : blochwalk::parse_config_document(doc))
    report(blochwalk::run_experiment(cfg, out), quiet);
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electric discrete-time quantum walk simulator"};
  app.require_subcommand(1);
  std::string out_flag;
  bool quiet = false;
  app.add_option("--out", out_flag, "Output directory (default: $BLOCHWALK_OUT or ./blochwalk_out)");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config file");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "JSON config (one object or a list)")->required();

  auto* preset_cmd = app.add_subcommand("preset", "Run a built-in preset");
  std::string preset_name;
  const auto names = blochwalk::presets::names();
  preset_cmd->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(names));

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter of a config");
  std::string sweep_config, axis, values;
  sweep_cmd->add_option("--config", sweep_config, "Base JSON config")->required();
  sweep_cmd->add_option("--axis", axis, "phi, beta or theta")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values, e.g. 2pi/20,2pi/40")->required();

  for (auto* sub : {run_cmd, preset_cmd, sweep_cmd}) {
    sub->add_option("--out", out_flag, "Output directory");
    sub->add_flag("--quiet", quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const fs::path out = output_root(out_flag);
  try {
    if (*run_cmd) {
      run_document(blochwalk::load_json_file(config_path), out, quiet);
    } else if (*preset_cmd) {
      run_document(blochwalk::json::parse(*blochwalk::presets::find(preset_name)), out, quiet);
    } else if (*sweep_cmd) {
      const auto configs = blochwalk::parse_config_document(blochwalk::load_json_file(sweep_config));
      if (configs.size() != 1) throw blochwalk::ConfigError("config", "a sweep needs a single config");
      const auto ax = blochwalk::parse_sweep_axis(axis);
      std::vector<double> parsed;
      for (const auto& v : split_values(values)) parsed.push_back(blochwalk::parse_sweep_value(ax, v));
      const auto rows = blochwalk::sweep(configs.front(), ax, parsed, out);
      if (!quiet) {
        const auto csv = blochwalk::sweep_directory(out, configs.front(), ax) / "sweep.csv";
        std::printf("%s: %zu sweep row(s)\n", csv.string().c_str(), rows.size());
      }
    }
  } catch (const blochwalk::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const blochwalk::NoWrapViolation& e) {
    std::fprintf(stderr, "no-wrap violation: %s\n", e.what());
    return kExitNoWrap;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
