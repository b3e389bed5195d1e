#pragma once

// Weakly asymmetric scaling of open ASEP. Every epsilon-dependent model
// constant lives here: bulk jump rates p, q; Robin multipliers mu_A, mu_B;
// boundary creation/annihilation rates alpha, beta, gamma, delta; the
// exponential-transform constants lambda, nu; and the narrow-wedge
// normalizer rho_norm.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kpzlab {

enum class Geometry { kHalfLine, kInterval };

struct ScalingParams {
  double epsilon = 0.0;
  double sqrt_epsilon = 0.0;
  double A = 0.0;
  std::optional<double> B;  // absent on the half-line
  Geometry geometry = Geometry::kHalfLine;
  int N = 0;  // interval only; epsilon == 1/N exactly

  double p = 0.0;      // right jump rate, e^{sqrt(eps)}/2
  double q = 0.0;      // left jump rate, e^{-sqrt(eps)}/2
  double mu_A = 0.0;   // 1 - A*eps
  double mu_B = 0.0;   // 1 - B*eps (NaN on the half-line)
  double alpha = 0.0;  // creation at site 1
  double gamma = 0.0;  // annihilation at site 1
  double beta = 0.0;   // annihilation at site N (NaN on the half-line)
  double delta = 0.0;  // creation at site N (NaN on the half-line)

  double lambda = 0.0;    // -sqrt(eps)
  double nu = 0.0;        // cosh(sqrt(eps)) - 1
  double rho_norm = 1.0;  // narrow-wedge normalizer

  double valid_epsilon_max = 0.0;  // all rates nonnegative for eps <= this

  bool is_interval() const { return geometry == Geometry::kInterval; }
};

namespace detail {

inline double rate_alpha(double p, double q, double mu) {
  return std::pow(p, 1.5) * (std::sqrt(p) - mu * std::sqrt(q)) / (p - q);
}
inline double rate_gamma(double p, double q, double mu) {
  return std::pow(q, 1.5) * (std::sqrt(q) - mu * std::sqrt(p)) / (q - p);
}

struct RawRates {
  double p, q, mu_A, mu_B, alpha, beta, gamma, delta;
};

inline RawRates raw_rates(double epsilon, double A, double B) {
  RawRates r;
  const double se = std::sqrt(epsilon);
  r.p = 0.5 * std::exp(se);
  r.q = 0.5 * std::exp(-se);
  r.mu_A = 1.0 - A * epsilon;
  r.mu_B = 1.0 - B * epsilon;
  r.alpha = rate_alpha(r.p, r.q, r.mu_A);
  r.beta = rate_alpha(r.p, r.q, r.mu_B);
  r.gamma = rate_gamma(r.p, r.q, r.mu_A);
  r.delta = rate_gamma(r.p, r.q, r.mu_B);
  return r;
}

// Name of the first negative rate at this epsilon, or empty if all valid.
inline std::string offending_rate(double epsilon, double A, std::optional<double> B) {
  const RawRates r = raw_rates(epsilon, A, B.value_or(0.0));
  if (r.alpha < 0.0) return "alpha";
  if (r.gamma < 0.0) return "gamma";
  if (B) {
    if (r.beta < 0.0) return "beta";
    if (r.delta < 0.0) return "delta";
  }
  return {};
}

}  // namespace detail

// Largest epsilon in (0,1] below which every rate stays nonnegative.
// Found by bisection (tolerance 1e-12) against the closed-form rates;
// the returned window is then re-checked on a dense grid and shrunk if
// a non-monotone pocket ever shows up.
inline double max_epsilon(double A, std::optional<double> B = std::nullopt) {
  const auto valid = [&](double e) { return detail::offending_rate(e, A, B).empty(); };
  double lo = 0.0, hi = 1.0;
  if (valid(1.0)) {
    lo = 1.0;
  } else {
    // lo starts at a tiny epsilon; all rates tend to 1/4 there.
    lo = 1e-9;
    while (!valid(lo) && lo > 1e-15) lo *= 0.5;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (valid(mid) ? lo : hi) = mid;
    }
  }
  for (int k = 1; k <= 4096; ++k) {
    const double e = lo * k / 4096.0;
    if (e > 0.0 && !valid(e)) lo = e * (1.0 - 1e-9);
  }
  return lo;
}

namespace detail {

inline ScalingParams build(double epsilon, double A, std::optional<double> B, Geometry geom,
                           int N) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("scaling: epsilon must be positive");
  ScalingParams s;
  s.epsilon = epsilon;
  s.sqrt_epsilon = std::sqrt(epsilon);
  s.A = A;
  s.B = B;
  s.geometry = geom;
  s.N = N;

  const RawRates r = raw_rates(epsilon, A, B.value_or(0.0));
  s.p = r.p;
  s.q = r.q;
  s.mu_A = r.mu_A;
  s.mu_B = B ? r.mu_B : std::nan("");
  s.alpha = r.alpha;
  s.gamma = r.gamma;
  s.beta = B ? r.beta : std::nan("");
  s.delta = B ? r.delta : std::nan("");

  s.lambda = -s.sqrt_epsilon;
  s.nu = std::cosh(s.sqrt_epsilon) - 1.0;
  s.rho_norm = (geom == Geometry::kInterval) ? 1.0 / (1.0 - std::exp(-1.0)) : 1.0;
  s.valid_epsilon_max = max_epsilon(A, B);

  const std::string bad = offending_rate(epsilon, A, B);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "scaling: epsilon=" << epsilon << " is outside the validity window (<= "
        << s.valid_epsilon_max << "): rate " << bad << " is negative";
    throw std::invalid_argument(msg.str());
  }
  return s;
}

}  // namespace detail

inline ScalingParams build_half_line(double epsilon, double A) {
  return detail::build(epsilon, A, std::nullopt, Geometry::kHalfLine, 0);
}

// Interval of N+1 sites {0,...,N}; epsilon = 1/N exactly.
inline ScalingParams build_interval(int N, double A, double B) {
  if (N < 2) throw std::invalid_argument("scaling: interval needs N >= 2");
  return detail::build(1.0 / N, A, B, Geometry::kInterval, N);
}

// Distances from the closed-form rates to their first-order expansions
// around the critical point: each is O(epsilon).
struct AsymptoticResiduals {
  double p, q, alpha, gamma;
  double beta, delta;  // NaN on the half-line
};

inline AsymptoticResiduals asymptotic_residuals(const ScalingParams& s) {
  AsymptoticResiduals r;
  const double se = s.sqrt_epsilon;
  r.p = std::abs(s.p - 0.5 - 0.5 * se);
  r.q = std::abs(s.q - 0.5 + 0.5 * se);
  const double slope_A = (3.0 / 8.0 + s.A / 4.0) * se;
  r.alpha = std::abs(s.alpha - 0.25 - slope_A);
  r.gamma = std::abs(s.gamma - 0.25 + slope_A);
  if (s.B) {
    const double slope_B = (3.0 / 8.0 + *s.B / 4.0) * se;
    r.beta = std::abs(s.beta - 0.25 - slope_B);
    r.delta = std::abs(s.delta - 0.25 + slope_B);
  } else {
    r.beta = std::nan("");
    r.delta = std::nan("");
  }
  return r;
}

}  // namespace kpzlab
