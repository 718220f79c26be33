// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
//
// floq: simulator and analysis toolkit for disordered U(1)-symmetric
// Floquet circuits.  Subcommands select the run mode; configuration comes
// from a JSON file (--config) or a built-in recipe (--preset), with
// --out/--seed/--threads overrides.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "floq/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "Path to a JSON config file");
  cmd->add_option("--preset", flags.preset_name,
                  "Name of a built-in recipe (see `floq list-presets`)");
  cmd->add_option("--out", flags.out_dir, "Output directory override");
  cmd->add_option("--seed", flags.seed, "Master seed override")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--threads", flags.threads,
                  "Worker threads (0 = all cores)");
}

int run_mode(const std::string& mode, const CommonFlags& flags) {
  floq::RunConfig cfg;
  if (!flags.config_path.empty() && !flags.preset_name.empty()) {
    std::fprintf(stderr, "error: pass either --config or --preset, not both\n");
    return 2;
  }
  if (!flags.config_path.empty()) {
    cfg = floq::load_config_file(flags.config_path);
  } else if (!flags.preset_name.empty()) {
    const auto all = floq::presets();
    const auto it = all.find(flags.preset_name);
    if (it == all.end()) {
      std::string names;
      for (const auto& [name, unused] : all) {
        if (!names.empty()) names += ", ";
        names += name;
      }
      std::fprintf(stderr, "error: unknown preset '%s' (available: %s)\n",
                   flags.preset_name.c_str(), names.c_str());
      return 2;
    }
    cfg = floq::RunConfig::from_json(it->second);
  } else {
    std::fprintf(stderr, "error: %s requires --config or --preset\n",
                 mode.c_str());
    return 2;
  }

  if (cfg.mode != mode) {
    std::fprintf(stderr,
                 "error: subcommand '%s' does not match the config's mode "
                 "'%s'\n",
                 mode.c_str(), cfg.mode.c_str());
    return 2;
  }
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.seed_set) cfg.master_seed = flags.seed;
  if (flags.threads >= 0) cfg.threads = flags.threads;
  return floq::run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floq: disordered Floquet-circuit transport and spectra"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(floq::kCodeVersion));

  const std::vector<std::string> modes = {"transport", "spectral", "drift",
                                          "prethermal", "sweep"};
  std::map<std::string, CommonFlags> flags;
  std::map<std::string, CLI::App*> cmds;
  for (const auto& mode : modes) {
    CLI::App* cmd = app.add_subcommand(
        mode, "Run the " + mode + " mode (config's mode must match)");
    add_common_flags(cmd, flags[mode]);
    cmds[mode] = cmd;
  }
  CLI::App* list_cmd =
      app.add_subcommand("list-presets", "List built-in recipe names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& [name, cfg] : floq::presets())
        std::printf("%s\t(mode: %s)\n", name.c_str(),
                    cfg.at("mode").get<std::string>().c_str());
      return 0;
    }
    for (const auto& mode : modes)
      if (cmds[mode]->parsed()) return run_mode(mode, flags[mode]);
    std::fprintf(stderr, "error: no subcommand given (try --help)\n");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const std::string msg = e.what();
    return msg.rfind("config", 0) == 0 ? 2 : 1;
  }
}
