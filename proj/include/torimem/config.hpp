#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "torimem/dynamics.hpp"

namespace torimem {

enum class ExperimentKind {
  lifetime_scaling,
  density_vs_t,
  pair_confinement,
  table_dump,
  verify_decomposition,
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { unknown_key, type_error, range_error };

  ConfigError(Kind kind, int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        kind(kind),
        line(line) {}

  Kind kind;
  int line;
};

// Batch experiment description, parsed from a flat "key = value" text file
// ('#' starts a comment). Lists are comma-separated. Defaults, including
// the derived ones (xi_L = L, g_Omega tuned), are materialized at parse
// time and echoed back by serialize_config for provenance.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::lifetime_scaling;
  std::vector<int> sizes;            // key "L"
  std::vector<double> temperatures;  // key "T"
  CouplingParams couplings;          // delta, g_omega, v_omega, g_Omega, v_Omega, xi_L, a, z
  Mode mode = Mode::toric_boson;
  int trajectories = 100;            // per (L, T) point; config count for verify kind
  std::int64_t max_time = 100000;    // sweeps
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 0;                   // 0 = hardware concurrency
  std::int64_t burn_in = 1000;       // sweeps (density / confinement)
  std::int64_t window = 10000;       // measurement window, sweeps
  std::int64_t observe_interval = 0; // 0 = no time series

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);  // throws ConfigError
std::string serialize_config(const ExperimentConfig& config);

std::string to_string(ExperimentKind kind);
std::string to_string(Mode mode);

}  // namespace torimem
