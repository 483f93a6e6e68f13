#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "torimem/rng.hpp"

namespace torimem {

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double median(std::vector<double> values);

// Median of right-censored data; censored entries count as +infinity.
// Returns false (and leaves *out untouched) when the median itself is
// censored, i.e. at least half the entries are.
bool censored_median(const std::vector<double>& times, const std::vector<char>& censored,
                     double* out);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Regularized upper incomplete gamma Q(a, x); chi-square survival function
// is Q(dof/2, chi2/2).
double gamma_q(double a, double x);
double chi_square_p_value(double chi2, int dof);

// Pearson chi-square against expected probabilities, merging trailing bins
// until every expected count is at least 5. Returns the p-value.
double chi_square_test(const std::vector<std::int64_t>& observed,
                       const std::vector<double>& expected_probs);

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  double stderr_est = 0.0;
};

// Percentile bootstrap CI for the median of (possibly censored) samples.
// Resamples whose median is censored are redrawn a bounded number of times.
BootstrapCi bootstrap_median_ci(const std::vector<double>& times,
                                const std::vector<char>& censored, int n_resamples,
                                double conf_level, Rng& rng);

struct AutocorrResult {
  double mean = 0.0;
  double stderr_est = 0.0;
  double tau_int = 0.5;  // 0.5 for white noise
  std::int64_t n = 0;
};

// Mean with autocorrelation-aware error bars: integrated autocorrelation
// time via the standard self-consistent window, effective sample size
// n / (2 tau_int).
AutocorrResult autocorr_analysis(const std::vector<double>& series);

}  // namespace torimem
