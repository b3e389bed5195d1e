#pragma once

// Replica-parallel execution with order-independent outputs. Each replica's
// work is a pure function of its index (streams come from the counter-based
// generator keyed by index), workers pull indices from a shared counter, and
// reductions run sequentially over the stored per-replica values afterwards,
// so results are byte-identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace kpzlab {

template <class F>
void parallel_replicas(std::uint64_t n, int workers, F&& per_replica) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) per_replica(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    constexpr std::uint64_t kChunk = 8;
    for (;;) {
      const std::uint64_t lo = next.fetch_add(kChunk);
      if (lo >= n) return;
      const std::uint64_t hi = std::min(n, lo + kChunk);
      for (std::uint64_t i = lo; i < hi; ++i) per_replica(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Mean/variance accumulator in sufficient-statistics form; merging is
// associative and commutative up to floating order, so summaries are only
// ever reduced sequentially over replica index.
struct Summary {
  std::int64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  void merge(const Summary& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double var() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, (sumsq - n * m * m) / (n - 1));
  }
  double se() const { return n > 0 ? std::sqrt(var() / n) : 0.0; }
  double zscore() const {
    const double s = se();
    return s > 0.0 ? mean() / s : 0.0;
  }
};

inline Summary reduce_summaries(const std::vector<double>& values) {
  Summary s;
  for (double v : values) s.add(v);
  return s;
}

}  // namespace kpzlab
