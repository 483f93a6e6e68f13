#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "torimem/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"torimem: thermal-stability experiments for the toric code with "
               "boson-mediated defect confinement"};

  std::string config_path;
  int workers = -1;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;

  app.add_option("config", config_path, "experiment config file (key = value lines)")
      ->required();
  app.add_option("--workers", workers, "worker threads (overrides config and TORIMEM_WORKERS)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  std::ifstream in(config_path);
  if (!in.good()) {
    std::cerr << "config error: cannot read " << config_path << "\n";
    return torimem::kExitConfigError;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  torimem::ExperimentConfig cfg;
  try {
    cfg = torimem::parse_config(buf.str());
  } catch (const torimem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return torimem::kExitConfigError;
  }

  if (workers >= 0) {
    cfg.workers = workers;
  } else if (cfg.workers == 0) {
    if (const char* env = std::getenv("TORIMEM_WORKERS")) {
      const long w = std::strtol(env, nullptr, 10);
      if (w > 0) cfg.workers = static_cast<int>(w);
    }
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed_given) cfg.seed = seed;

  try {
    return torimem::run_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return torimem::kExitConfigError;
  }
}
