#pragma once

// Small statistics helpers: Poisson CDF, one-sided stochastic-domination
// Kolmogorov-Smirnov checks, two-sample KS distance, binomial intervals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace kpzlab {

inline double poisson_cdf(int k, double lambda) {
  if (k < 0) return 0.0;
  if (lambda <= 0.0) return 1.0;
  double log_term = -lambda;  // log pmf at 0
  double cdf = std::exp(log_term);
  for (int j = 1; j <= k; ++j) {
    log_term += std::log(lambda / j);
    cdf += std::exp(log_term);
  }
  return std::min(cdf, 1.0);
}

// One-sided KS check that integer samples are stochastically dominated by
// Poisson(lambda): under domination F_samples(k) >= F_Poisson(k), so the
// statistic sup_k [F_Poisson(k) - F_emp(k)] should stay below the one-sided
// critical value sqrt(ln(1/alpha) / 2n).
struct DominationKS {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

inline DominationKS poisson_domination_ks(std::vector<std::int64_t> samples, double lambda,
                                          double alpha = 0.01) {
  DominationKS out;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const std::int64_t kmax = samples.empty() ? 0 : samples.back();
  std::size_t idx = 0;
  double log_term = -lambda;
  double cdf = std::exp(log_term);
  for (std::int64_t k = 0; k <= kmax; ++k) {
    if (k > 0) {
      log_term += std::log(lambda / static_cast<double>(k));
      cdf += std::exp(log_term);
    }
    while (idx < samples.size() && samples[idx] <= k) ++idx;
    const double f_emp = static_cast<double>(idx) / n;
    out.statistic = std::max(out.statistic, std::min(cdf, 1.0) - f_emp);
  }
  out.critical = std::sqrt(std::log(1.0 / alpha) / (2.0 * n));
  out.pass = out.statistic <= out.critical;
  return out;
}

// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// Normal-approximation binomial confidence half-width.
inline double binomial_ci_halfwidth(double p_hat, std::int64_t n, double z = 1.96) {
  if (n <= 0) return 1.0;
  return z * std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / static_cast<double>(n));
}

}  // namespace kpzlab
