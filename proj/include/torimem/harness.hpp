#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "torimem/dynamics.hpp"
#include "torimem/stats.hpp"

namespace torimem {

// One seeded run from the ground state to first logical failure (or
// censoring at max_time). Logical failure is assessed at defect-free
// instants only: whenever a sector's defect count returns to zero, a
// nontrivial winding parity of its chain marks the failure.
struct TrajectoryRecord {
  int L = 0;
  Mode mode = Mode::toric_boson;
  double temperature = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t seed = 0;  // derived stream seed
  std::int64_t index = 0;

  bool censored = false;
  double failure_time = 0.0;        // sweeps; equals max_time when censored
  std::string failure_sector;       // "x-h", "x-v", "x-hv", "z-h", ... ; empty when censored
  std::int64_t max_time = 0;

  // max defect count of the failing sector during its final excursion;
  // <= 2 means the failure was driven by a single pair
  int failing_excursion_max_defects = 0;
  bool single_pair_failure = false;

  std::vector<std::array<double, 3>> series;  // (sweep, N_d, energy)

  double wall_ms = 0.0;  // bookkeeping only, never serialized
};

TrajectoryRecord measure_lifetime(const LatticeGeometry& geom, const PotentialTable* table,
                                  const CouplingParams& params, const DynamicsConfig& config,
                                  std::uint64_t master_seed, std::int64_t index,
                                  std::int64_t observe_interval = 0);

struct DensityEstimate {
  double density = 0.0;    // defects per stabilizer site, both sectors
  double stderr_est = 0.0;
  double tau_int = 0.5;    // sweeps
  std::int64_t window = 0;
  bool autocorr_warning = false;  // tau_int > window / 10
};

DensityEstimate equilibrium_density(const LatticeGeometry& geom, const PotentialTable* table,
                                    const CouplingParams& params, double temperature,
                                    std::int64_t burn_in, std::int64_t window,
                                    std::uint64_t seed);

struct PairSeparation {
  double mean_r = 0.0;
  double stderr_est = 0.0;  // zero for the exact sum
  double tau_int = 0.5;
};

// Exact two-particle statistics: Boltzmann sum over all L^2 - 1 nonzero
// displacements of the table, weight exp(-u(r)/T), r the minimal-image
// Euclidean separation. No Monte Carlo involved.
PairSeparation pair_separation_exact(const PotentialTable& table, double temperature);

// Hop-only Metropolis for one immortal pair of plaquette defects
// (creation/annihilation disabled; hops onto the partner rejected). One
// sweep is one proposal per defect per direction (8 proposals).
PairSeparation pair_separation_mc(const LatticeGeometry& geom, const PotentialTable& table,
                                  const CouplingParams& params, double temperature,
                                  std::int64_t burn_in, std::int64_t n_sweeps,
                                  std::uint64_t seed);

struct ScalingPoint {
  int L = 0;
  double median_lifetime = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double censored_fraction = 0.0;
  int n_total = 0;
  int n_uncensored = 0;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double slope = 0.0;       // d log(median) / d log(L)
  double slope_stderr = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
};

// Per-size medians with bootstrap confidence bands and censoring fractions.
// Points whose median order statistic is censored report zeros for the
// median and band.
std::vector<ScalingPoint> point_summaries(const std::vector<TrajectoryRecord>& records,
                                          int n_resamples = 1000, double conf_level = 0.95,
                                          std::uint64_t bootstrap_seed = 0x5ca1ab1e);

// Least-squares slope of log(median lifetime) vs log(L) with a bootstrap
// confidence interval. Uses only points whose censoring fraction is below
// one half and which retain at least 20 uncensored trajectories; throws
// InsufficientDataError with fewer than 3 usable sizes.
ScalingFit scaling_fit(const std::vector<TrajectoryRecord>& records,
                       int n_resamples = 1000, double conf_level = 0.95,
                       std::uint64_t bootstrap_seed = 0x5ca1ab1e);

// Independent single-pair first-passage oracle: the relative coordinate of
// one defect pair performs a symmetric random walk on the L x L torus,
// restarting adjacent to the origin after every even-winding annihilation,
// until it annihilates with odd winding. Returns the elapsed time in
// sweep-equivalent units (8 relative steps per sweep). Measures the pure
// excursion time scale; pair-creation waiting times are excluded.
double single_pair_walk_failure_time(int L, Rng& rng);

}  // namespace torimem
