#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "torimem/potential.hpp"
#include "torimem/rng.hpp"

namespace torimem {

enum class Mode { bare, toric_boson, custom_z };

// Single-spin-flip Metropolis dynamics at temperature T. One sweep is one
// attempted flip per edge per error type (2 * N_edges attempts); all times
// are reported in sweeps.
struct DynamicsConfig {
  double temperature = 1.0;
  Mode mode = Mode::toric_boson;
  std::uint64_t seed = 1;
  std::int64_t max_time = 10000;  // sweeps

  void validate() const;
};

inline bool metropolis_accept(double delta_e, double temperature, Rng& rng) {
  if (delta_e <= 0.0) return true;
  return rng.next_double() < std::exp(-delta_e / temperature);
}

struct MoveOutcome {
  bool accepted = false;
  ErrorKind kind = ErrorKind::x;
  int edge = -1;
  double delta_e = 0.0;
  // the touched sector (plaquette for x, star for z) reached zero defects
  bool sector_emptied = false;
};

// Picks a uniformly random (edge, error type), evaluates the energy change,
// accepts with probability min(1, exp(-dE/T)) and applies the flip,
// keeping state.cached_energy in sync.
MoveOutcome attempt_move(SystemState& state, const PotentialTable* table,
                         const CouplingParams& params, double temperature, Rng& rng);

struct SweepStats {
  std::int64_t attempts = 0;
  std::int64_t accepted = 0;
};

using SweepObserver = std::function<void(std::int64_t sweep, const SystemState&)>;

// Runs n_sweeps full sweeps. The observer, when given, fires after every
// observe_interval-th sweep. Fully deterministic for a given rng state.
SweepStats run_sweeps(SystemState& state, const PotentialTable* table,
                      const CouplingParams& params, double temperature,
                      std::int64_t n_sweeps, Rng& rng,
                      const SweepObserver& observer = {}, std::int64_t observe_interval = 0);

}  // namespace torimem
