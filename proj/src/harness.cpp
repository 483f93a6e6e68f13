#include "torimem/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace torimem {

namespace {

std::string sector_name(ErrorKind kind, bool winds_h, bool winds_v) {
  std::string s = kind == ErrorKind::x ? "x-" : "z-";
  if (winds_h) s += 'h';
  if (winds_v) s += 'v';
  return s;
}

double min_image_distance(int dx, int dy, int L) {
  dx = ((dx % L) + L) % L;
  dy = ((dy % L) + L) % L;
  dx = std::min(dx, L - dx);
  dy = std::min(dy, L - dy);
  return std::hypot(static_cast<double>(dx), static_cast<double>(dy));
}

}  // namespace

TrajectoryRecord measure_lifetime(const LatticeGeometry& geom, const PotentialTable* table,
                                  const CouplingParams& params, const DynamicsConfig& config,
                                  std::uint64_t master_seed, std::int64_t index,
                                  std::int64_t observe_interval) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  TrajectoryRecord rec;
  rec.L = geom.L();
  rec.mode = config.mode;
  rec.temperature = config.temperature;
  rec.master_seed = master_seed;
  rec.seed = stream_seed(master_seed, static_cast<std::uint64_t>(index));
  rec.index = index;
  rec.max_time = config.max_time;

  Rng rng(rec.seed);
  SystemState state(geom);

  const std::int64_t per_sweep = 2LL * geom.n_edges();
  const std::int64_t total_attempts = config.max_time * per_sweep;

  // per-sector running maximum of the defect count since the sector was
  // last empty (its current "excursion")
  int excursion_max[2] = {0, 0};

  rec.censored = true;
  rec.failure_time = static_cast<double>(config.max_time);

  for (std::int64_t attempt = 0; attempt < total_attempts; ++attempt) {
    const MoveOutcome mv = attempt_move(state, table, params, config.temperature, rng);
    if (mv.accepted) {
      const int sector = mv.kind == ErrorKind::x ? 0 : 1;
      const int count =
          mv.kind == ErrorKind::x ? state.defect_count_p() : state.defect_count_s();
      excursion_max[sector] = std::max(excursion_max[sector], count);
      if (mv.sector_emptied) {
        const bool wh = state.winding(mv.kind == ErrorKind::x ? LatticeGeometry::kCutXWindH
                                                              : LatticeGeometry::kCutZWindH);
        const bool wv = state.winding(mv.kind == ErrorKind::x ? LatticeGeometry::kCutXWindV
                                                              : LatticeGeometry::kCutZWindV);
        if (wh || wv) {
          rec.censored = false;
          rec.failure_time = static_cast<double>(attempt + 1) / static_cast<double>(per_sweep);
          rec.failure_sector = sector_name(mv.kind, wh, wv);
          rec.failing_excursion_max_defects = excursion_max[sector];
          rec.single_pair_failure = excursion_max[sector] <= 2;
          break;
        }
        excursion_max[sector] = 0;
      }
    }
    if (observe_interval > 0 && (attempt + 1) % per_sweep == 0) {
      const std::int64_t sweep = (attempt + 1) / per_sweep;
      if (sweep % observe_interval == 0)
        rec.series.push_back({static_cast<double>(sweep),
                              static_cast<double>(state.defect_count()),
                              state.cached_energy});
    }
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0).count();
  return rec;
}

DensityEstimate equilibrium_density(const LatticeGeometry& geom, const PotentialTable* table,
                                    const CouplingParams& params, double temperature,
                                    std::int64_t burn_in, std::int64_t window,
                                    std::uint64_t seed) {
  if (window < 1) throw std::invalid_argument("equilibrium_density: window >= 1");
  Rng rng(seed);
  SystemState state(geom);
  if (burn_in > 0) run_sweeps(state, table, params, temperature, burn_in, rng);

  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(window));
  const double sites = 2.0 * geom.n_sites();
  run_sweeps(state, table, params, temperature, window, rng,
             [&](std::int64_t, const SystemState& s) {
               series.push_back(static_cast<double>(s.defect_count()) / sites);
             },
             1);

  const AutocorrResult ac = autocorr_analysis(series);
  DensityEstimate out;
  out.density = ac.mean;
  out.stderr_est = ac.stderr_est;
  out.tau_int = ac.tau_int;
  out.window = window;
  out.autocorr_warning = ac.tau_int > static_cast<double>(window) / 10.0;
  return out;
}

PairSeparation pair_separation_exact(const PotentialTable& table, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  const int L = table.L();
  double z = 0.0, zr = 0.0;
  for (int dx = 0; dx < L; ++dx)
    for (int dy = 0; dy < L; ++dy) {
      if (dx == 0 && dy == 0) continue;
      const double w = std::exp(-table.at(dx, dy) / temperature);
      z += w;
      zr += w * min_image_distance(dx, dy, L);
    }
  PairSeparation out;
  out.mean_r = zr / z;
  return out;
}

PairSeparation pair_separation_mc(const LatticeGeometry& geom, const PotentialTable& table,
                                  const CouplingParams& params, double temperature,
                                  std::int64_t burn_in, std::int64_t n_sweeps,
                                  std::uint64_t seed) {
  if (n_sweeps < 1) throw std::invalid_argument("pair_separation_mc: n_sweeps >= 1");
  const int L = geom.L();
  Rng rng(seed);

  SystemState state(geom);
  // seed one adjacent plaquette pair: the vertical edge (1,0) separates
  // faces (0,0) and (1,0)
  state.apply_flip(geom.edge_index(1, 0, LatticeGeometry::kVertical), ErrorKind::x);

  // hop moves: defect at face (x,y) crosses one of its four boundary edges
  auto propose = [&](Rng& r) {
    const auto& sites = state.plaq_set().sites();
    const int mover = sites[r.next_below(2)];
    const int x = geom.site_x(mover), y = geom.site_y(mover);
    const int dir = static_cast<int>(r.next_below(4));
    int edge, target;
    switch (dir) {
      case 0:  // +x, through the right edge
        edge = geom.edge_index(x + 1, y, LatticeGeometry::kVertical);
        target = geom.site_index(x + 1, y);
        break;
      case 1:  // -x
        edge = geom.edge_index(x, y, LatticeGeometry::kVertical);
        target = geom.site_index(x - 1, y);
        break;
      case 2:  // +y, through the top edge
        edge = geom.edge_index(x, y + 1, LatticeGeometry::kHorizontal);
        target = geom.site_index(x, y + 1);
        break;
      default:  // -y
        edge = geom.edge_index(x, y, LatticeGeometry::kHorizontal);
        target = geom.site_index(x, y - 1);
        break;
    }
    if (state.plaquette_defects().test(target)) return;  // annihilation disabled
    const double de = pair_energy_delta(state, &table, params, edge, ErrorKind::x);
    if (metropolis_accept(de, temperature, r)) state.apply_flip(edge, ErrorKind::x);
  };

  auto separation = [&]() {
    const auto& sites = state.plaq_set().sites();
    return min_image_distance(geom.site_x(sites[0]) - geom.site_x(sites[1]),
                              geom.site_y(sites[0]) - geom.site_y(sites[1]), L);
  };

  for (std::int64_t s = 0; s < burn_in; ++s)
    for (int i = 0; i < 8; ++i) propose(rng);

  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(n_sweeps));
  for (std::int64_t s = 0; s < n_sweeps; ++s) {
    for (int i = 0; i < 8; ++i) propose(rng);
    series.push_back(separation());
  }

  const AutocorrResult ac = autocorr_analysis(series);
  PairSeparation out;
  out.mean_r = ac.mean;
  out.stderr_est = ac.stderr_est;
  out.tau_int = ac.tau_int;
  return out;
}

namespace {

std::map<int, std::pair<std::vector<double>, std::vector<char>>> group_by_size(
    const std::vector<TrajectoryRecord>& records) {
  std::map<int, std::pair<std::vector<double>, std::vector<char>>> by_size;
  for (const auto& r : records) {
    auto& [times, cens] = by_size[r.L];
    times.push_back(r.failure_time);
    cens.push_back(r.censored ? 1 : 0);
  }
  return by_size;
}

}  // namespace

std::vector<ScalingPoint> point_summaries(const std::vector<TrajectoryRecord>& records,
                                          int n_resamples, double conf_level,
                                          std::uint64_t bootstrap_seed) {
  std::vector<ScalingPoint> points;
  Rng rng(bootstrap_seed);
  for (auto& [L, data] : group_by_size(records)) {
    auto& [times, cens] = data;
    ScalingPoint pt;
    pt.L = L;
    pt.n_total = static_cast<int>(times.size());
    for (char c : cens) pt.n_uncensored += c ? 0 : 1;
    pt.censored_fraction =
        static_cast<double>(pt.n_total - pt.n_uncensored) / static_cast<double>(pt.n_total);

    double med = 0.0;
    if (censored_median(times, cens, &med)) {
      pt.median_lifetime = med;
      const BootstrapCi ci = bootstrap_median_ci(times, cens, n_resamples, conf_level, rng);
      pt.ci_lo = ci.lo;
      pt.ci_hi = ci.hi;
    }
    points.push_back(pt);
  }
  return points;
}

ScalingFit scaling_fit(const std::vector<TrajectoryRecord>& records, int n_resamples,
                       double conf_level, std::uint64_t bootstrap_seed) {
  auto by_size = group_by_size(records);

  ScalingFit fit;
  fit.points = point_summaries(records, n_resamples, conf_level, bootstrap_seed);

  std::vector<double> log_l, log_t;
  for (const auto& pt : fit.points)
    if (pt.median_lifetime > 0.0 && pt.censored_fraction < 0.5 && pt.n_uncensored >= 20) {
      log_l.push_back(std::log(static_cast<double>(pt.L)));
      log_t.push_back(std::log(pt.median_lifetime));
    }

  if (log_l.size() < 3)
    throw InsufficientDataError(
        "scaling_fit needs >= 3 sizes with majority-uncensored medians and "
        ">= 20 uncensored trajectories each");

  fit.slope = least_squares(log_l, log_t).slope;
  Rng rng(splitmix64(bootstrap_seed));  // fresh stream for the slope bootstrap

  // bootstrap the per-point medians, refit the slope
  std::vector<double> slopes;
  slopes.reserve(n_resamples);
  for (int b = 0; b < n_resamples; ++b) {
    std::vector<double> bl, bt;
    for (auto& [L, data] : by_size) {
      auto& [times, cens] = data;
      const std::size_t n = times.size();
      std::vector<double> t(n);
      std::vector<char> c(n);
      double med = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        std::size_t n_unc = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto j = static_cast<std::size_t>(rng.next_below(n));
          t[i] = times[j];
          c[i] = cens[j];
          n_unc += c[i] ? 0 : 1;
        }
        if (2 * n_unc <= n || n_unc < 20) continue;
        ok = censored_median(t, c, &med) && med > 0.0;
      }
      if (ok) {
        bl.push_back(std::log(static_cast<double>(L)));
        bt.push_back(std::log(med));
      }
    }
    if (bl.size() >= 3) slopes.push_back(least_squares(bl, bt).slope);
  }
  if (slopes.empty()) throw InsufficientDataError("scaling_fit: bootstrap produced no slopes");

  std::sort(slopes.begin(), slopes.end());
  const double alpha = 0.5 * (1.0 - conf_level);
  auto pick = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return slopes[lo] * (1.0 - frac) + slopes[hi] * frac;
  };
  fit.slope_ci_lo = pick(alpha);
  fit.slope_ci_hi = pick(1.0 - alpha);
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= static_cast<double>(slopes.size());
  double var = 0.0;
  for (double s : slopes) var += (s - mean) * (s - mean);
  fit.slope_stderr = std::sqrt(var / static_cast<double>(slopes.size()));
  return fit;
}

double single_pair_walk_failure_time(int L, Rng& rng) {
  // relative coordinate walk; 8 relative steps correspond to one sweep
  // (each of the two defects attempts all four of its hops once per sweep)
  std::int64_t steps = 0;
  for (;;) {
    int x = 1, y = 0;  // start adjacent
    int wind_x = 0, wind_y = 0;
    for (;;) {
      ++steps;
      switch (static_cast<int>(rng.next_below(4))) {
        case 0:
          if (++x == L) { x = 0; ++wind_x; }
          break;
        case 1:
          if (--x < 0) { x = L - 1; --wind_x; }
          break;
        case 2:
          if (++y == L) { y = 0; ++wind_y; }
          break;
        default:
          if (--y < 0) { y = L - 1; --wind_y; }
          break;
      }
      if (x == 0 && y == 0) break;  // annihilation
    }
    if ((wind_x & 1) || (wind_y & 1))
      return static_cast<double>(steps) / 8.0;
  }
}

}  // namespace torimem
