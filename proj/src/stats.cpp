#include "torimem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace torimem {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  const std::size_t n = values.size();
  std::nth_element(values.begin(), values.begin() + n / 2, values.end());
  double hi = values[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + n / 2 - 1, values.begin() + n / 2);
  return 0.5 * (values[n / 2 - 1] + hi);
}

bool censored_median(const std::vector<double>& times, const std::vector<char>& censored,
                     double* out) {
  const std::size_t n = times.size();
  if (n == 0 || censored.size() != n)
    throw std::invalid_argument("censored_median: bad input sizes");
  std::size_t n_cens = 0;
  for (char c : censored) n_cens += c ? 1 : 0;
  if (2 * n_cens >= n) return false;  // median order statistic is censored

  std::vector<double> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    t.push_back(censored[i] ? std::numeric_limits<double>::infinity() : times[i]);
  // with fewer than half censored the middle order statistics are finite
  const double m = median(std::move(t));
  if (!std::isfinite(m)) return false;
  *out = m;
  return true;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

namespace {

// series expansion of P(a,x), valid for x < a + 1
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a,x), valid for x >= a + 1
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_p_value(double chi2, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_p_value: dof >= 1");
  return gamma_q(0.5 * dof, 0.5 * chi2);
}

double chi_square_test(const std::vector<std::int64_t>& observed,
                       const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_test: bad bins");
  std::int64_t total = 0;
  for (auto o : observed) total += o;
  if (total <= 0) throw std::invalid_argument("chi_square_test: empty sample");

  // order bins by expected count and merge the smallest ones upward
  std::vector<std::size_t> order(observed.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return expected_probs[l] > expected_probs[r];
  });

  std::vector<double> exp_merged;
  std::vector<double> obs_merged;
  double exp_acc = 0.0, obs_acc = 0.0;
  for (std::size_t idx : order) {
    exp_acc += expected_probs[idx] * static_cast<double>(total);
    obs_acc += static_cast<double>(observed[idx]);
    if (exp_acc >= 5.0) {
      exp_merged.push_back(exp_acc);
      obs_merged.push_back(obs_acc);
      exp_acc = obs_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (!exp_merged.empty()) {
      exp_merged.back() += exp_acc;
      obs_merged.back() += obs_acc;
    } else {
      exp_merged.push_back(exp_acc);
      obs_merged.push_back(obs_acc);
    }
  }
  if (exp_merged.size() < 2) return 1.0;  // everything merged into one bin

  double chi2 = 0.0;
  for (std::size_t i = 0; i < exp_merged.size(); ++i) {
    const double d = obs_merged[i] - exp_merged[i];
    chi2 += d * d / exp_merged[i];
  }
  return chi_square_p_value(chi2, static_cast<int>(exp_merged.size()) - 1);
}

BootstrapCi bootstrap_median_ci(const std::vector<double>& times,
                                const std::vector<char>& censored, int n_resamples,
                                double conf_level, Rng& rng) {
  if (times.empty() || times.size() != censored.size())
    throw std::invalid_argument("bootstrap_median_ci: bad input");
  const std::size_t n = times.size();

  std::vector<double> medians;
  medians.reserve(n_resamples);
  std::vector<double> t(n);
  std::vector<char> c(n);
  for (int b = 0; b < n_resamples; ++b) {
    double m = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(rng.next_below(n));
        t[i] = times[j];
        c[i] = censored[j];
      }
      ok = censored_median(t, c, &m);
    }
    if (ok) medians.push_back(m);
  }
  if (medians.empty())
    throw InsufficientDataError("bootstrap: resample medians all censored");

  std::sort(medians.begin(), medians.end());
  const double alpha = 0.5 * (1.0 - conf_level);
  auto pick = [&](double q) {
    const double pos = q * static_cast<double>(medians.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, medians.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return medians[lo] * (1.0 - frac) + medians[hi] * frac;
  };

  BootstrapCi ci;
  ci.lo = pick(alpha);
  ci.hi = pick(1.0 - alpha);
  double mean = 0.0;
  for (double m : medians) mean += m;
  mean /= static_cast<double>(medians.size());
  double var = 0.0;
  for (double m : medians) var += (m - mean) * (m - mean);
  ci.stderr_est = std::sqrt(var / static_cast<double>(medians.size()));
  return ci;
}

AutocorrResult autocorr_analysis(const std::vector<double>& series) {
  AutocorrResult out;
  out.n = static_cast<std::int64_t>(series.size());
  if (series.empty()) throw std::invalid_argument("autocorr_analysis: empty series");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  out.mean = mean;

  const std::size_t n = series.size();
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var == 0.0 || n < 8) {
    out.stderr_est = 0.0;
    out.tau_int = 0.5;
    return out;
  }

  // self-consistent window (Sokal): stop once lag >= 6 * tau
  double tau = 0.5;
  const std::size_t max_lag = n / 4;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double acf = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      acf += (series[i] - mean) * (series[i + lag] - mean);
    acf /= var * static_cast<double>(n - lag);
    if (acf <= 0.0) break;
    tau += acf;
    if (static_cast<double>(lag) >= 6.0 * tau) break;
  }
  out.tau_int = tau;
  const double n_eff = static_cast<double>(n) / (2.0 * tau);
  out.stderr_est = std::sqrt(var / n_eff);
  return out;
}

}  // namespace torimem
