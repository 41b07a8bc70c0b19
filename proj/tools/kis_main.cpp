#include <CLI11.hpp>

#include "kis/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kicked Ising chain: Floquet chaos diagnostics, OTOC decay, and Liouvillian gaps"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long seed = -1;
  int workers = 0;
  bool resume = false;

  app.add_option("--config", config_path, "configuration file (JSON)");
  app.add_option("--set", overrides, "override a config key, e.g. --set gap.n_max=80")
      ->take_all();
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads for independent sweep points");
  app.add_flag("--resume", resume, "reuse completed checkpoints (always on; flag kept for scripts)");

  for (const char* name : {"diagnostics", "otoc", "gap", "extrapolate", "parity-gaps",
                           "validate", "sweep"})
    app.add_subcommand(name)->fallthrough();  // global options may follow the subcommand

  CLI11_PARSE(app, argc, argv);

  kis::harness::json cfg;
  try {
    cfg = kis::harness::load_config(config_path);
    for (const std::string& kv : overrides) kis::harness::apply_override(cfg, kv);
    if (seed >= 0) cfg["seed"] = seed;
    if (!out_dir.empty()) cfg["out"] = out_dir;
    if (workers > 0) cfg["workers"] = workers;
    kis::harness::validate_config(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  return kis::harness::run_command(app.get_subcommands().front()->get_name(), cfg);
}
