#pragma once

// Continuous-time simple random walk kernel p_t(x) on the integers,
// computed by uniformization: p_t(x) = sum_n e^{-t} t^n/n! P(S_n = x)
// with S_n the simple symmetric walk. The Poisson tail gives an exact
// truncation certificate, so every row carries a bound on what was cut.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kpzlab {

// Chernoff bound for the Poisson upper tail P(N(t) >= m), m >= 0.
// Dominates both the walk displacement tail and p_t(m) itself.
inline double poisson_tail_bound(double t, double m) {
  if (m <= t) return 1.0;
  if (t <= 0.0) return m > 0.0 ? 0.0 : 1.0;
  const double u = m / t;
  return std::exp(-t * (u * std::log(u) - u + 1.0));
}

// p_t(m) <= P(|S_t| >= |m|) <= 2 P(N(t) >= |m|).
inline double wholeline_point_bound(double t, double m) {
  return std::min(1.0, 2.0 * poisson_tail_bound(t, std::abs(m)));
}

// One row of the whole-line kernel: value(m) = p_t(m) for |m| <= length().
// Entries beyond the stored range are bounded by tail_beyond().
class WholeLineRow {
 public:
  WholeLineRow(double t, int length, double tol = 1e-13) : t_(t) {
    if (t < 0.0) throw std::invalid_argument("wholeline: negative time");
    length = std::max(length, 1);
    v_.assign(static_cast<std::size_t>(length) + 1, 0.0);
    if (t == 0.0) {
      v_[0] = 1.0;
      poisson_tail_ = 0.0;
      return;
    }

    // Upper bound on the number of uniformization steps for tail < tol/4.
    int nmax = static_cast<int>(t + 12.0 * std::sqrt(t + 1.0) + 60.0);
    while (poisson_tail_bound(t, nmax) > 0.25 * tol) nmax += 32;

    // Walk pmf on x >= 0 (symmetric), evolved exactly on full support.
    const int W = nmax + 1;
    std::vector<double> w(static_cast<std::size_t>(W) + 2, 0.0);
    std::vector<double> wn(w.size(), 0.0);
    w[0] = 1.0;

    const double logt = std::log(t);
    double cum = 0.0;
    const int span = static_cast<int>(v_.size());
    for (int n = 0; n <= nmax; ++n) {
      // Poisson weight in log space; fine even when e^{-t} underflows.
      const double lp = n * logt - t - std::lgamma(n + 1.0);
      if (lp > -700.0) {
        const double pn = std::exp(lp);
        cum += pn;
        const int hi = std::min(n, span - 1);
        for (int m = (n & 1); m <= hi; m += 2) v_[m] += pn * w[m];
      }
      if (n == nmax) break;
      // w_{n+1}(0) = w_n(1) and w_{n+1}(m) = (w_n(m-1)+w_n(m+1))/2, using
      // the reflection w(-1) = w(1); only sites with the parity of n+1
      // are occupied.
      const int hi = std::min(n + 1, W);
      if (((n + 1) & 1) == 0) {
        wn[0] = w[1];
        for (int m = 2; m <= hi; m += 2) wn[m] = 0.5 * (w[m - 1] + w[m + 1]);
      } else {
        for (int m = 1; m <= hi; m += 2) wn[m] = 0.5 * (w[m - 1] + w[m + 1]);
      }
      w.swap(wn);
    }
    poisson_tail_ = std::max(0.0, 1.0 - cum);
  }

  double t() const { return t_; }
  int length() const { return static_cast<int>(v_.size()) - 1; }

  double operator()(std::int64_t m) const {
    const std::uint64_t a = static_cast<std::uint64_t>(m < 0 ? -m : m);
    return a < v_.size() ? v_[a] : 0.0;
  }

  // Bound on sum_{|m| > length} p_t(m) plus the uniformization cutoff.
  double tail_beyond() const {
    return poisson_tail_ + 2.0 * poisson_tail_bound(t_, length() + 1);
  }
  double poisson_tail() const { return poisson_tail_; }

 private:
  double t_;
  double poisson_tail_;
  std::vector<double> v_;
};

// Single-point evaluation with tail certificate <= tol.
inline double wholeline_point(double t, std::int64_t x, double tol = 1e-13) {
  const std::int64_t a = x < 0 ? -x : x;
  WholeLineRow row(t, static_cast<int>(a), tol);
  return row(a);
}

// Both sides of the exponential-weight summation identity
//   sum_z p_t(x+z) mu^z = mu^{-x} exp[(mu + 1/mu - 2) t / 2].
// The left side is summed directly with a certified geometric tail.
struct GeneratingIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double tail_bound = 0.0;
};

inline GeneratingIdentity generating_identity(double t, std::int64_t x, double mu,
                                              double tol = 1e-12) {
  if (!(mu > 0.0)) throw std::invalid_argument("generating_identity: mu must be positive");
  GeneratingIdentity out;
  out.rhs = std::pow(mu, static_cast<double>(-x)) * std::exp(0.5 * (mu + 1.0 / mu - 2.0) * t);

  // sum_m p_t(m) mu^{m-x}; grow the window until the log-concave term
  // ratio certifies the remaining two-sided tail.
  int L = static_cast<int>(std::abs(static_cast<double>(x)) + t + 10.0 * std::sqrt(t + 1.0) + 64);
  for (int attempt = 0; attempt < 12; ++attempt) {
    WholeLineRow row(t, L, 0.01 * tol);
    const double mux = std::pow(mu, static_cast<double>(-x));
    double s = row(0) * mux;
    for (int m = 1; m <= row.length(); ++m) {
      s += row(m) * (std::pow(mu, m) + std::pow(mu, -m)) * mux;
    }
    // Tail via log-concavity of m -> p_t(m): the term ratio decreases.
    const int M = row.length();
    double tail = row.poisson_tail() * std::max(1.0, std::pow(mu, -static_cast<double>(x)));
    bool certified = true;
    for (const double side : {mu, 1.0 / mu}) {
      const double term = row(M) * std::pow(side, M) * mux;
      const double prev = row(M - 1) * std::pow(side, M - 1) * mux;
      if (term <= 0.0) continue;
      const double r = term / prev;
      if (r < 0.9) {
        tail += term * r / (1.0 - r);
      } else {
        certified = false;
      }
    }
    if (certified && tail < tol) {
      out.lhs = s;
      out.tail_bound = tail;
      return out;
    }
    L *= 2;
  }
  throw std::runtime_error("generating_identity: series tail failed to certify");
}

}  // namespace kpzlab
