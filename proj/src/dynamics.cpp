#include "torimem/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace torimem {

void DynamicsConfig::validate() const {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (max_time < 1) throw std::invalid_argument("max_time must be >= 1 sweep");
}

MoveOutcome attempt_move(SystemState& state, const PotentialTable* table,
                         const CouplingParams& params, double temperature, Rng& rng) {
  const LatticeGeometry& g = state.geometry();
  const int n = g.n_edges();
  const auto pick = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(2 * n)));

  MoveOutcome out;
  out.kind = pick < n ? ErrorKind::x : ErrorKind::z;
  out.edge = pick < n ? pick : pick - n;
  out.delta_e = pair_energy_delta(state, table, params, out.edge, out.kind);

  if (metropolis_accept(out.delta_e, temperature, rng)) {
    state.apply_flip(out.edge, out.kind);
    state.cached_energy += out.delta_e;
    out.accepted = true;
    const int count =
        out.kind == ErrorKind::x ? state.defect_count_p() : state.defect_count_s();
    out.sector_emptied = (count == 0);
  }
  return out;
}

SweepStats run_sweeps(SystemState& state, const PotentialTable* table,
                      const CouplingParams& params, double temperature,
                      std::int64_t n_sweeps, Rng& rng,
                      const SweepObserver& observer, std::int64_t observe_interval) {
  if (n_sweeps < 1) throw std::invalid_argument("run_sweeps needs n_sweeps >= 1");

  SweepStats stats;
  const std::int64_t per_sweep = 2LL * state.geometry().n_edges();
  for (std::int64_t sweep = 1; sweep <= n_sweeps; ++sweep) {
    for (std::int64_t i = 0; i < per_sweep; ++i) {
      if (attempt_move(state, table, params, temperature, rng).accepted) ++stats.accepted;
    }
    stats.attempts += per_sweep;
    if (observer && observe_interval > 0 && sweep % observe_interval == 0)
      observer(sweep, state);
  }
  return stats;
}

}  // namespace torimem
