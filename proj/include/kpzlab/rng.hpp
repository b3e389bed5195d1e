#pragma once

// Counter-based random number generation for reproducible parallel ensembles.
//
// The generator is Philox4x64 with 10 rounds. Each replica of an ensemble
// owns an independent stream obtained by putting (master_seed, stream_id)
// into the 128-bit key; the 256-bit counter then just enumerates draws.
// Streams never collide and a stream's output depends only on
// (master_seed, stream_id, draw index), which is what makes ensemble
// output byte-stable under any replica-to-worker assignment.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>

namespace kpzlab {

class Philox {
 public:
  Philox() : Philox(0, 0) {}
  Philox(std::uint64_t master_seed, std::uint64_t stream_id) {
    key_[0] = master_seed;
    key_[1] = stream_id;
    ctr_[0] = ctr_[1] = ctr_[2] = ctr_[3] = 0;
    idx_ = 4;
  }

  std::uint64_t next_u64() {
    if (idx_ == 4) {
      advance_counter();
      block(ctr_, key_, out_);
      idx_ = 0;
    }
    return out_[idx_++];
  }

  // Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double u01_pos() { return 1.0 - u01(); }

  double exponential(double rate) {
    assert(rate > 0.0);
    return -std::log(u01_pos()) / rate;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(u01_pos()));
    const double th = 6.283185307179586476925286766559 * u01();
    cached_ = r * std::sin(th);
    have_cached_ = true;
    return r * std::cos(th);
  }

  // Marsaglia-Tsang; shape > 0, unit scale.
  double gamma(double shape) {
    assert(shape > 0.0);
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(u01_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = u01_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // chi-distributed value with k degrees of freedom (k >= 1).
  double chi(double k) { return std::sqrt(2.0 * gamma(0.5 * k)); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n) {
    assert(n > 0);
    // Rejection to kill modulo bias.
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

 private:
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
  }

  static void block(const std::uint64_t ctr[4], const std::uint64_t key[4], std::uint64_t out[4]) {
    std::uint64_t x0 = ctr[0], x1 = ctr[1], x2 = ctr[2], x3 = ctr[3];
    std::uint64_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kW0;
        k1 += kW1;
      }
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kM0, x0, hi0, lo0);
      mulhilo(kM1, x2, hi1, lo1);
      const std::uint64_t y0 = hi1 ^ x1 ^ k0;
      const std::uint64_t y1 = lo1;
      const std::uint64_t y2 = hi0 ^ x3 ^ k1;
      const std::uint64_t y3 = lo0;
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
    }
    out[0] = x0;
    out[1] = x1;
    out[2] = x2;
    out[3] = x3;
  }

  void advance_counter() {
    if (++ctr_[0] != 0) return;
    if (++ctr_[1] != 0) return;
    if (++ctr_[2] != 0) return;
    ++ctr_[3];
  }

  std::uint64_t key_[2];
  std::uint64_t ctr_[4];
  std::uint64_t out_[4];
  int idx_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace kpzlab
