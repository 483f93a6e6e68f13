#include "torimem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "torimem/harness.hpp"

namespace torimem {

namespace {

using ordered_json = nlohmann::ordered_json;

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static task list, atomic dispatch. Task results must be stored by index
// by the callable so that output order is scheduling-independent.
template <typename Fn>
void parallel_for(std::int64_t n_tasks, int workers, const Fn& fn) {
  workers = std::min<std::int64_t>(workers, n_tasks) > 0
                ? static_cast<int>(std::min<std::int64_t>(workers, n_tasks))
                : 1;
  std::atomic<std::int64_t> next{0};
  auto drain = [&] {
    for (std::int64_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class OutputWriter {
 public:
  explicit OutputWriter(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory " + dir);
  }

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  void write_file(const std::string& name, const std::string& content) {
    std::ofstream os(path(name), std::ios::binary);
    os << content;
    os.flush();
    if (!os.good()) throw std::ios_base::failure("failed writing " + name);
  }

 private:
  std::filesystem::path dir_;
};

ordered_json trajectory_json(const TrajectoryRecord& r) {
  ordered_json j;
  j["type"] = "trajectory";
  j["index"] = r.index;
  j["L"] = r.L;
  j["T"] = r.temperature;
  j["mode"] = to_string(r.mode);
  j["master_seed"] = r.master_seed;
  j["seed"] = r.seed;
  j["max_time"] = r.max_time;
  j["censored"] = r.censored;
  j["failure_time"] = r.failure_time;
  if (!r.censored) {
    j["failure_sector"] = r.failure_sector;
    j["failing_excursion_max_defects"] = r.failing_excursion_max_defects;
    j["single_pair_failure"] = r.single_pair_failure;
  }
  if (!r.series.empty()) {
    ordered_json s = ordered_json::array();
    for (const auto& [sweep, nd, energy] : r.series)
      s.push_back(ordered_json::array({sweep, nd, energy}));
    j["series"] = s;
  }
  return j;
}

ordered_json fit_json(double T, const ScalingFit& fit) {
  ordered_json j;
  j["type"] = "scaling_fit";
  j["T"] = T;
  j["slope"] = fit.slope;
  j["slope_stderr"] = fit.slope_stderr;
  j["slope_ci_low"] = fit.slope_ci_lo;
  j["slope_ci_high"] = fit.slope_ci_hi;
  ordered_json pts = ordered_json::array();
  for (const auto& p : fit.points) {
    ordered_json q;
    q["L"] = p.L;
    q["median"] = p.median_lifetime;
    q["ci_low"] = p.ci_lo;
    q["ci_high"] = p.ci_hi;
    q["censored_fraction"] = p.censored_fraction;
    q["n_total"] = p.n_total;
    q["n_uncensored"] = p.n_uncensored;
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

// Tables are built single-threaded before workers start; worker-side get()
// calls are lookups only, so the map is shared read-only.
struct TableCache {
  const PotentialTable* get(int L, const CouplingParams& params) {
    auto it = cache.find(L);
    if (it == cache.end())
      it = cache.emplace(L, PotentialTable::compute(L, params)).first;
    return &it->second;
  }
  std::map<int, PotentialTable> cache;
};

int run_lifetime_scaling(const ExperimentConfig& cfg, OutputWriter& out, ordered_json& manifest) {
  const int n_l = static_cast<int>(cfg.sizes.size());
  const int n_t = static_cast<int>(cfg.temperatures.size());
  const std::int64_t per_point = cfg.trajectories;
  const std::int64_t n_tasks = static_cast<std::int64_t>(n_l) * n_t * per_point;

  std::map<int, std::unique_ptr<LatticeGeometry>> geoms;
  TableCache tables;
  for (int L : cfg.sizes) {
    geoms.emplace(L, std::make_unique<LatticeGeometry>(L));
    if (cfg.mode != Mode::bare) tables.get(L, cfg.couplings);
  }

  std::vector<TrajectoryRecord> records(n_tasks);
  parallel_for(n_tasks, resolve_workers(cfg.workers), [&](std::int64_t task) {
    const int ti = static_cast<int>(task / (static_cast<std::int64_t>(n_l) * per_point));
    const std::int64_t rem = task % (static_cast<std::int64_t>(n_l) * per_point);
    const int li = static_cast<int>(rem / per_point);
    const int L = cfg.sizes[li];

    CouplingParams params = cfg.couplings;
    params.temperature = cfg.temperatures[ti];
    DynamicsConfig dyn;
    dyn.temperature = cfg.temperatures[ti];
    dyn.mode = cfg.mode;
    dyn.max_time = cfg.max_time;

    const PotentialTable* table =
        cfg.mode == Mode::bare ? nullptr : tables.get(L, cfg.couplings);
    records[task] = measure_lifetime(*geoms.at(L), table, params, dyn, cfg.seed, task,
                                     cfg.observe_interval);
  });

  std::string jsonl;
  for (const auto& r : records) jsonl += trajectory_json(r).dump() + "\n";

  std::string csv = "L,T,median,ci_low,ci_high,censored_fraction\n";
  bool insufficient = false;
  for (int ti = 0; ti < n_t; ++ti) {
    std::vector<TrajectoryRecord> slice(
        records.begin() + static_cast<std::int64_t>(ti) * n_l * per_point,
        records.begin() + static_cast<std::int64_t>(ti + 1) * n_l * per_point);

    // per-point summaries go into the CSV whether or not the fit is possible
    std::vector<ScalingPoint> points;
    try {
      const ScalingFit fit = scaling_fit(slice);
      points = fit.points;
      jsonl += fit_json(cfg.temperatures[ti], fit).dump() + "\n";
    } catch (const InsufficientDataError& e) {
      insufficient = true;
      points = point_summaries(slice);
      ordered_json j;
      j["type"] = "scaling_fit";
      j["T"] = cfg.temperatures[ti];
      j["error"] = e.what();
      jsonl += j.dump() + "\n";
    }
    for (const auto& p : points)
      csv += std::to_string(p.L) + "," + csv_num(cfg.temperatures[ti]) + "," +
             csv_num(p.median_lifetime) + "," + csv_num(p.ci_lo) + "," + csv_num(p.ci_hi) +
             "," + csv_num(p.censored_fraction) + "\n";
  }

  out.write_file("records.jsonl", jsonl);
  out.write_file("summary.csv", csv);
  manifest["trajectories_run"] = n_tasks;
  return insufficient ? kExitInsufficientData : kExitOk;
}

int run_density(const ExperimentConfig& cfg, OutputWriter& out, ordered_json& manifest) {
  const int n_points = static_cast<int>(cfg.sizes.size() * cfg.temperatures.size());
  struct Point {
    int L;
    double T;
    DensityEstimate est;
  };
  std::vector<Point> points(n_points);

  std::map<int, std::unique_ptr<LatticeGeometry>> geoms;
  TableCache tables;
  for (int L : cfg.sizes) {
    geoms.emplace(L, std::make_unique<LatticeGeometry>(L));
    if (cfg.mode != Mode::bare) tables.get(L, cfg.couplings);
  }

  parallel_for(n_points, resolve_workers(cfg.workers), [&](std::int64_t i) {
    const int li = static_cast<int>(i) % static_cast<int>(cfg.sizes.size());
    const int ti = static_cast<int>(i) / static_cast<int>(cfg.sizes.size());
    const int L = cfg.sizes[li];
    const double T = cfg.temperatures[ti];
    const PotentialTable* table =
        cfg.mode == Mode::bare ? nullptr : tables.get(L, cfg.couplings);
    points[i] = {L, T,
                 equilibrium_density(*geoms.at(L), table, cfg.couplings, T, cfg.burn_in,
                                     cfg.window, stream_seed(cfg.seed, i))};
  });

  std::string jsonl;
  std::string csv = "L,T,density,stderr,tau_int,autocorr_warning\n";
  for (const auto& p : points) {
    ordered_json j;
    j["type"] = "density";
    j["L"] = p.L;
    j["T"] = p.T;
    j["density"] = p.est.density;
    j["stderr"] = p.est.stderr_est;
    j["tau_int"] = p.est.tau_int;
    j["window"] = p.est.window;
    j["autocorr_warning"] = p.est.autocorr_warning;
    jsonl += j.dump() + "\n";
    csv += std::to_string(p.L) + "," + csv_num(p.T) + "," + csv_num(p.est.density) + "," +
           csv_num(p.est.stderr_est) + "," + csv_num(p.est.tau_int) + "," +
           (p.est.autocorr_warning ? "1" : "0") + "\n";
    if (p.est.autocorr_warning)
      std::cerr << "warning: autocorrelation time " << p.est.tau_int
                << " sweeps exceeds window/10 at L=" << p.L << " T=" << p.T << "\n";
  }
  out.write_file("records.jsonl", jsonl);
  out.write_file("summary.csv", csv);
  manifest["points"] = n_points;
  return kExitOk;
}

int run_confinement(const ExperimentConfig& cfg, OutputWriter& out, ordered_json& manifest) {
  const int n_points = static_cast<int>(cfg.sizes.size() * cfg.temperatures.size());
  struct Point {
    int L;
    double T;
    PairSeparation exact;
    PairSeparation mc;
  };
  std::vector<Point> points(n_points);

  std::map<int, std::unique_ptr<LatticeGeometry>> geoms;
  TableCache tables;
  for (int L : cfg.sizes) {
    geoms.emplace(L, std::make_unique<LatticeGeometry>(L));
    tables.get(L, cfg.couplings);
  }

  parallel_for(n_points, resolve_workers(cfg.workers), [&](std::int64_t i) {
    const int li = static_cast<int>(i) % static_cast<int>(cfg.sizes.size());
    const int ti = static_cast<int>(i) / static_cast<int>(cfg.sizes.size());
    const int L = cfg.sizes[li];
    const double T = cfg.temperatures[ti];
    const PotentialTable* table = tables.get(L, cfg.couplings);
    Point p{L, T, pair_separation_exact(*table, T), {}};
    p.mc = pair_separation_mc(*geoms.at(L), *table, cfg.couplings, T, cfg.burn_in,
                              cfg.window, stream_seed(cfg.seed, i));
    points[i] = p;
  });

  std::string jsonl;
  std::string csv = "L,T,mean_r_exact,mean_r_mc,mc_stderr\n";
  for (const auto& p : points) {
    ordered_json j;
    j["type"] = "confinement";
    j["L"] = p.L;
    j["T"] = p.T;
    j["mean_r_exact"] = p.exact.mean_r;
    j["mean_r_mc"] = p.mc.mean_r;
    j["mc_stderr"] = p.mc.stderr_est;
    j["mc_tau_int"] = p.mc.tau_int;
    jsonl += j.dump() + "\n";
    csv += std::to_string(p.L) + "," + csv_num(p.T) + "," + csv_num(p.exact.mean_r) + "," +
           csv_num(p.mc.mean_r) + "," + csv_num(p.mc.stderr_est) + "\n";
  }
  out.write_file("records.jsonl", jsonl);
  out.write_file("summary.csv", csv);
  manifest["points"] = n_points;
  return kExitOk;
}

int run_table_dump(const ExperimentConfig& cfg, OutputWriter& out, ordered_json& manifest) {
  for (int L : cfg.sizes) {
    const PotentialTable table = PotentialTable::compute(L, cfg.couplings);
    std::ostringstream os;
    table.write_csv(os);
    out.write_file("table_L" + std::to_string(L) + ".csv", os.str());
  }
  manifest["tables"] = cfg.sizes.size();
  return kExitOk;
}

int run_verify_decomposition(const ExperimentConfig& cfg, OutputWriter& out,
                             ordered_json& manifest) {
  double max_rel = 0.0;
  std::string jsonl;
  for (std::size_t li = 0; li < cfg.sizes.size(); ++li) {
    const int L = cfg.sizes[li];
    Rng rng(stream_seed(cfg.seed, li));
    double worst = 0.0;
    for (int c = 0; c < cfg.trajectories; ++c) {
      const int n_defects = 2 * (1 + static_cast<int>(rng.next_below(4)));  // 2..8
      std::vector<std::pair<int, int>> pos;
      while (static_cast<int>(pos.size()) < n_defects) {
        const int x = static_cast<int>(rng.next_below(L));
        const int y = static_cast<int>(rng.next_below(L));
        bool dup = false;
        for (const auto& [px, py] : pos) dup |= (px == x && py == y);
        if (!dup) pos.emplace_back(x, y);
      }
      worst = std::max(worst, verify_decomposition(pos, L, cfg.couplings).rel_discrepancy);
    }
    ordered_json j;
    j["type"] = "decomposition_check";
    j["L"] = L;
    j["n_configs"] = cfg.trajectories;
    j["max_rel_discrepancy"] = worst;
    jsonl += j.dump() + "\n";
    max_rel = std::max(max_rel, worst);
  }
  out.write_file("records.jsonl", jsonl);
  std::printf("max relative discrepancy = %.3e (threshold 1e-8)\n", max_rel);
  manifest["max_rel_discrepancy"] = max_rel;
  return max_rel < 1e-8 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    cfg.couplings.validate();
    OutputWriter out(cfg.out_dir);

    ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["kind"] = to_string(cfg.kind);
    manifest["seed"] = cfg.seed;
    manifest["workers_used"] = resolve_workers(cfg.workers);
    manifest["config"] = serialize_config(cfg);

    int code = kExitOk;
    switch (cfg.kind) {
      case ExperimentKind::lifetime_scaling:
        code = run_lifetime_scaling(cfg, out, manifest);
        break;
      case ExperimentKind::density_vs_t:
        code = run_density(cfg, out, manifest);
        break;
      case ExperimentKind::pair_confinement:
        code = run_confinement(cfg, out, manifest);
        break;
      case ExperimentKind::table_dump:
        code = run_table_dump(cfg, out, manifest);
        break;
      case ExperimentKind::verify_decomposition:
        code = run_verify_decomposition(cfg, out, manifest);
        break;
    }

    manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.write_file("manifest.json", manifest.dump(2) + "\n");
    return code;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kExitInsufficientData;
  }
}

}  // namespace torimem
