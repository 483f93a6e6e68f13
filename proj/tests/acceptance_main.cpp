// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "torimem/experiment.hpp"
#include "torimem/harness.hpp"

using namespace torimem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void criterion(int id, const std::string& label, double budget_s,
               const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_budget = budget_s <= 0.0 || secs < budget_s;
  const bool pass = out.ok && in_budget;
  if (!pass) ++g_failures;
  std::printf("[%s] criterion %d: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", id,
              label.c_str(), secs,
              in_budget ? "" : fmt(", over the %.0f s budget", budget_s).c_str());
  if (!out.detail.empty()) {
    std::istringstream lines(out.detail);
    std::string line;
    while (std::getline(lines, line)) std::printf("    %s\n", line.c_str());
  }
  std::fflush(stdout);
}

// independent direct O(L^4) k-sum, the oracle side of criterion 1
double direct_raw(int L, const CouplingParams& p, int dx, int dy) {
  double sum = 0.0;
  for (int nx = 0; nx < L; ++nx)
    for (int ny = 0; ny < L; ++ny) {
      if (nx == 0 && ny == 0) continue;
      const double kx = 2.0 * std::numbers::pi * nx / L;
      const double ky = 2.0 * std::numbers::pi * ny / L;
      const double d = (2.0 - 2.0 * std::cos(kx)) + (2.0 - 2.0 * std::cos(ky));
      double dz = 1.0;
      for (int i = 0; i < p.z; ++i) dz *= d;
      sum += std::cos(kx * dx + ky * dy) / (p.v_omega * p.v_omega * dz);
    }
  return -p.g_omega * p.g_omega * sum / (static_cast<double>(L) * L);
}

struct LifetimeBatch {
  std::vector<TrajectoryRecord> records;
  double median_t = 0.0;
  bool median_defined = false;
  BootstrapCi ci;
  double censored_fraction = 0.0;
  double single_pair_fraction = 0.0;
};

LifetimeBatch run_lifetimes(int L, double T, double delta, Mode mode, int n,
                            std::int64_t max_time, std::uint64_t seed) {
  LatticeGeometry geom(L);
  CouplingParams p;
  p.delta = delta;
  p.temperature = T;
  PotentialTable table = PotentialTable::compute(L, p);
  const PotentialTable* tp = mode == Mode::bare ? nullptr : &table;

  DynamicsConfig dyn;
  dyn.temperature = T;
  dyn.mode = mode;
  dyn.max_time = max_time;

  LifetimeBatch batch;
  batch.records.resize(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      batch.records[i] = measure_lifetime(geom, tp, p, dyn, seed, i);
  };
  const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < hw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<double> times;
  std::vector<char> cens;
  int n_unc = 0, n_sp = 0;
  for (const auto& r : batch.records) {
    times.push_back(r.failure_time);
    cens.push_back(r.censored ? 1 : 0);
    if (!r.censored) {
      ++n_unc;
      n_sp += r.single_pair_failure ? 1 : 0;
    }
  }
  batch.censored_fraction = 1.0 - static_cast<double>(n_unc) / n;
  batch.single_pair_fraction = n_unc ? static_cast<double>(n_sp) / n_unc : 0.0;
  batch.median_defined = censored_median(times, cens, &batch.median_t);
  if (batch.median_defined) {
    Rng rng(12345);
    batch.ci = bootstrap_median_ci(times, cens, 1000, 0.95, rng);
  }
  return batch;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c1_table_vs_direct() {
  CouplingParams p;
  p.g_omega = 1.3;
  p.v_omega = 0.7;
  double worst = 0.0;
  for (int L : {4, 8, 16}) {
    const PotentialTable t = PotentialTable::compute(L, p);
    for (int dx = 0; dx < L; ++dx)
      for (int dy = 0; dy < L; ++dy)
        worst = std::max(worst, std::abs(t.raw_at(dx, dy) - direct_raw(L, p, dx, dy)));
  }
  Outcome o;
  o.ok = worst < 1e-10;
  o.detail = fmt("max |transform - direct| = %.3e over L in {4,8,16} (tolerance 1e-10)",
                 worst);
  return o;
}

Outcome c2_log_asymptotics() {
  CouplingParams p;
  const PotentialTable t = PotentialTable::compute(128, p);
  std::vector<double> lx, ly;
  for (int r = 4; r <= 32; ++r) {
    lx.push_back(std::log(static_cast<double>(r)));
    ly.push_back(t.at(r, 0));
  }
  const double slope = least_squares(lx, ly).slope;
  const double c = p.log_prefactor();
  const double rel = std::abs(slope - c) / c;
  Outcome o;
  o.ok = rel < 0.05;
  o.detail = fmt("slope = %.6f vs c = %.6f (rel dev %.2f%%, tolerance 5%%)", slope, c,
                 100.0 * rel);
  return o;
}

Outcome c3_decomposition() {
  CouplingParams p;
  Rng rng(2026);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 * (1 + static_cast<int>(rng.next_below(4)));
    std::vector<std::pair<int, int>> pos;
    while (static_cast<int>(pos.size()) < n) {
      const int x = static_cast<int>(rng.next_below(8));
      const int y = static_cast<int>(rng.next_below(8));
      bool dup = false;
      for (auto& [px, py] : pos) dup |= (px == x && py == y);
      if (!dup) pos.emplace_back(x, y);
    }
    worst = std::max(worst, verify_decomposition(pos, 8, p).rel_discrepancy);
  }
  Outcome o;
  o.ok = worst < 1e-8;
  o.detail = fmt("max relative discrepancy = %.3e over 100 random configs (tolerance 1e-8)",
                 worst);
  return o;
}

Outcome c4_equilibrium_exactness() {
  LatticeGeometry g(2);
  CouplingParams p;  // delta = 1
  const double T = 1.0;
  SystemState s(g);
  Rng rng(2024);
  run_sweeps(s, nullptr, p, T, 2000, rng);

  std::vector<std::int64_t> counts(5, 0);
  run_sweeps(s, nullptr, p, T, 1000000, rng,
             [&](std::int64_t, const SystemState& st) { ++counts[st.defect_count() / 2]; },
             25);  // thinned to de-correlate

  const double pval = chi_square_test(counts, testing::bare_l2_total_probs(p.delta, T));
  Outcome o;
  o.ok = pval > 0.01;
  o.detail = fmt("energy histogram chi-square p = %.4f over 10^6 sweeps (threshold 0.01)",
                 pval);
  return o;
}

Outcome c5_confinement_transition() {
  CouplingParams p;  // g = v = 1 -> T* = 1/(4 pi)
  const double ts = p.pair_confinement_temperature();
  const PotentialTable t32 = PotentialTable::compute(32, p);
  const PotentialTable t64 = PotentialTable::compute(64, p);

  const double low = pair_separation_exact(t64, 0.5 * ts).mean_r /
                     pair_separation_exact(t32, 0.5 * ts).mean_r;
  const double high = pair_separation_exact(t64, 2.0 * ts).mean_r /
                      pair_separation_exact(t32, 2.0 * ts).mean_r;

  std::string detail = fmt("exact <r> ratios L64/L32: %.3f at T*/2 (< 1.2), %.3f at 2T* "
                           "(within [1.7, 2.3])\n", low, high);
  bool ok = low < 1.2 && high > 1.7 && high < 2.3;

  // hop-only MC agreement at L = 16, three temperatures spanning T*
  LatticeGeometry g16(16);
  const PotentialTable t16 = PotentialTable::compute(16, p);
  for (double f : {0.5, 1.0, 2.0}) {
    const double exact = pair_separation_exact(t16, f * ts).mean_r;
    const PairSeparation mc = pair_separation_mc(g16, t16, p, f * ts, 20000, 300000, 31);
    const double sig = std::abs(mc.mean_r - exact) / mc.stderr_est;
    detail += fmt("MC at L=16, T=%.1fT*: exact %.4f vs MC %.4f +- %.4f (%.2f sigma)\n", f,
                  exact, mc.mean_r, mc.stderr_est, sig);
    ok = ok && sig < 3.0;
  }
  detail.pop_back();
  return Outcome{ok, detail};
}

Outcome c6_bare_microscopic_lifetime() {
  // T = delta/3, sizes 8/16/32, 50 trajectories each. Failure is assessed
  // at defect-free instants (the decoder-free definition used throughout);
  // censoring fractions are part of the report.
  const double delta = 1.0, T = delta / 3.0;
  std::string detail;
  std::vector<LifetimeBatch> batches;
  for (int L : {8, 16, 32}) {
    batches.push_back(run_lifetimes(L, T, delta, Mode::bare, 50, 50000, 77));
    const LifetimeBatch& b = batches.back();
    if (b.median_defined)
      detail += fmt("L=%2d: median %.1f sweeps, 95%% CI [%.1f, %.1f], censored %.0f%%\n",
                    L, b.median_t, b.ci.lo, b.ci.hi, 100.0 * b.censored_fraction);
    else
      detail += fmt("L=%2d: median not identifiable (censored %.0f%% at max_time 50000)\n",
                    L, 100.0 * b.censored_fraction);
  }

  bool ok = true;
  for (const auto& b : batches) ok = ok && b.median_defined;
  if (ok)
    for (std::size_t i = 0; i < batches.size() && ok; ++i)
      for (std::size_t j = i + 1; j < batches.size() && ok; ++j)
        ok = batches[i].ci.lo <= batches[j].ci.hi && batches[j].ci.lo <= batches[i].ci.hi;
  detail += ok ? "all 95% CIs overlap"
               : "medians are NOT statistically indistinguishable: defect-free instants "
                 "become exponentially rare in L^2 at this defect density, so the "
                 "decoder-free estimator cannot expose the L-independent relaxation time";
  return Outcome{ok, detail};
}

Outcome c7_isolated_pair_regime() {
  // warmest temperature at which >= 90% of failures are single-pair at both
  // sizes (measured; see detail lines)
  const double delta = 1.0, T = delta / 7.0;
  const LifetimeBatch b8 = run_lifetimes(8, T, delta, Mode::bare, 100, 400000, 123);
  const LifetimeBatch b16 = run_lifetimes(16, T, delta, Mode::bare, 100, 400000, 123);

  std::string detail =
      fmt("T = delta/7: single-pair failure fractions %.2f (L=8), %.2f (L=16)\n",
          b8.single_pair_fraction, b16.single_pair_fraction);
  const bool regime_ok =
      b8.single_pair_fraction >= 0.9 && b16.single_pair_fraction >= 0.9;

  bool ratio_ok = false;
  if (b8.median_defined && b16.median_defined) {
    const double ratio = b16.median_t / b8.median_t;
    ratio_ok = ratio >= 2.0 && ratio <= 6.0;
    detail += fmt("MC median lifetimes: %.1f (L=8), %.1f (L=16); ratio %.2f "
                  "(required 4 within 50%%: [2, 6])\n", b8.median_t, b16.median_t, ratio);
  } else {
    detail += "MC medians not identifiable\n";
  }

  // independent single-pair random-walk first-passage oracle
  Rng rng(9);
  auto oracle_median = [&](int L) {
    std::vector<double> v;
    for (int i = 0; i < 2000; ++i) v.push_back(single_pair_walk_failure_time(L, rng));
    return median(v);
  };
  const double o8 = oracle_median(8);
  const double o16 = oracle_median(16);
  const double oracle_ratio = o16 / o8;
  const bool oracle_ok = oracle_ratio >= 2.0 && oracle_ratio <= 6.0;
  detail += fmt("walk-oracle excursion medians: %.1f (L=8), %.1f (L=16); ratio %.2f %s\n",
                o8, o16, oracle_ratio, oracle_ok ? "(in [2, 6])" : "(outside [2, 6])");

  const bool ok = regime_ok && ratio_ok && oracle_ok;
  if (!ratio_ok && oracle_ok)
    detail += "MC lifetimes are dominated by the pair-creation waiting time "
              "(~ 1/(4 L^2 e^{-2 delta/T})), which shortens with L and inverts the "
              "excursion-time L^2 scaling that the oracle isolates";
  else
    detail.pop_back();
  return Outcome{ok, detail};
}

Outcome c8_polynomial_scaling() {
  CouplingParams ref;
  const double ts = ref.pair_confinement_temperature();
  const double delta = 0.15;
  const std::vector<int> sizes = {8, 12, 16, 24};

  auto fit_at = [&](double T, std::int64_t max_time, std::uint64_t seed) {
    std::vector<TrajectoryRecord> all;
    std::string points;
    for (int L : sizes) {
      LifetimeBatch b = run_lifetimes(L, T, delta, Mode::toric_boson, 100, max_time, seed);
      for (auto& r : b.records) all.push_back(std::move(r));
      points += fmt(" L%d: %.0f (cens %.0f%%)", L, b.median_t, 100.0 * b.censored_fraction);
    }
    const ScalingFit f = scaling_fit(all);
    return std::pair<ScalingFit, std::string>(f, points);
  };

  const auto [fit06, pts06] = fit_at(0.6 * ts, 40000, 2001);
  const auto [fit04, pts04] = fit_at(0.4 * ts, 1200000, 2002);

  std::string detail;
  detail += fmt("T = 0.6 T*: exponent %.2f, 95%% CI [%.2f, %.2f]; medians:%s\n",
                fit06.slope, fit06.slope_ci_lo, fit06.slope_ci_hi, pts06.c_str());
  detail += fmt("T = 0.4 T*: exponent %.2f, 95%% CI [%.2f, %.2f]; medians:%s\n",
                fit04.slope, fit04.slope_ci_lo, fit04.slope_ci_hi, pts04.c_str());
  const bool positive = fit06.slope_ci_lo > 0.0;
  const bool ordered = fit04.slope > fit06.slope;
  detail += fmt("exponent positive at 95%% confidence: %s; "
                "exponent(0.4 T*) > exponent(0.6 T*): %s",
                positive ? "yes" : "no", ordered ? "yes" : "no");
  return Outcome{positive && ordered, detail};
}

Outcome c9_determinism() {
  namespace fs = std::filesystem;
  const std::string text =
      "kind = lifetime-scaling\nL = 4,6,8\nT = 0.5\nmode = bare\n"
      "trajectories = 30\nmax_time = 2000\nseed = 11\n";
  const fs::path base = fs::temp_directory_path() / "torimem_acceptance";
  fs::remove_all(base);

  auto run_into = [&](const std::string& name, int workers) {
    ExperimentConfig c = parse_config(text);
    c.out_dir = (base / name).string();
    c.workers = workers;
    if (run_experiment(c) != kExitOk) throw std::runtime_error("experiment failed");
    return base / name;
  };

  const fs::path a = run_into("a", 1);
  const fs::path b = run_into("b", 1);
  const fs::path c = run_into("c", 4);

  const bool rerun_identical = slurp(a / "records.jsonl") == slurp(b / "records.jsonl") &&
                               slurp(a / "summary.csv") == slurp(b / "summary.csv");
  const bool workers_identical = slurp(a / "records.jsonl") == slurp(c / "records.jsonl") &&
                                 slurp(a / "summary.csv") == slurp(c / "summary.csv");
  Outcome o;
  o.ok = rerun_identical && workers_identical;
  o.detail = fmt("rerun byte-identical: %s; 1 vs 4 workers byte-identical: %s",
                 rerun_identical ? "yes" : "no", workers_identical ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  std::printf("torimem acceptance suite\n------------------------\n");
  criterion(1, "potential table equals direct k-sum (1e-10, L in {4,8,16})", 1.0,
            c1_table_vs_direct);
  criterion(2, "logarithmic asymptotics at L = 128 (slope = c within 5%)", 5.0,
            c2_log_asymptotics);
  criterion(3, "decomposition identity (< 1e-8, 100 random configs, L = 8)", 10.0,
            c3_decomposition);
  criterion(4, "bare L = 2 equilibrium matches exact enumeration (chi^2 p > 0.01)", 30.0,
            c4_equilibrium_exactness);
  criterion(5, "two-particle confinement transition (exact sums + MC within 3 sigma)",
            300.0, c5_confinement_transition);
  criterion(6, "bare-model lifetimes statistically L-independent at T = delta/3", 1800.0,
            c6_bare_microscopic_lifetime);
  criterion(7, "isolated-pair regime: L^2 lifetime ratio with walk-oracle cross-check",
            0.0, c7_isolated_pair_regime);
  criterion(8, "boson-coupled lifetime exponent positive and steeper when colder",
            14400.0, c8_polynomial_scaling);
  criterion(9, "byte-identical reruns and worker-count independence", 0.0, c9_determinism);

  std::printf("------------------------\n%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
