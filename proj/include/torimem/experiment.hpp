#pragma once

#include <string>

#include "torimem/config.hpp"

namespace torimem {

inline constexpr const char* kVersion = "torimem 0.1.0";

// exit codes shared by run_experiment and the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;       // verify-decomposition above threshold
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInsufficientData = 3;
inline constexpr int kExitIoError = 4;

// Runs the configured experiment, writing records.jsonl, summary.csv and
// manifest.json (plus per-size table CSVs for table-dump) under
// config.out_dir. Identical config and seed give byte-identical records
// and summaries for any worker count; only the manifest carries wall time.
int run_experiment(const ExperimentConfig& config);

}  // namespace torimem
