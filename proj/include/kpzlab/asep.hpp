#pragma once

// Event-driven open ASEP on the half-line window {1..L} or the interval
// {1..N}, with boundary reservoirs. Occupation variables live in {0,1}
// internally (+-1 in the rate formulas). The sampler is a total-rate
// exponential clock plus a categorical pick over six rate classes; the
// two bond classes are backed by O(1) indexed sets, so one event costs
// O(1) regardless of system size.
//
// Height bookkeeping: h(0) counts twice (annihilations - creations) at
// the left reservoir, so interior heights never move on reservoir events;
// right-reservoir events (interval) move h(N) through eta(N) directly.

#include <kpzlab/rng.hpp>
#include <kpzlab/scaling.hpp>

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpzlab {

enum class AsepEvent : std::uint8_t {
  kJumpRight = 0,       // bond x: particle x -> x+1, h(x) -= 2
  kJumpLeft = 1,        // bond x: particle x+1 -> x, h(x) += 2
  kCreateLeft = 2,      // site 1, h(0) -= 2
  kAnnihilateLeft = 3,  // site 1, h(0) += 2
  kCreateRight = 4,     // site N, h(N) += 2
  kAnnihilateRight = 5, // site N, h(N) -= 2
};

struct AsepEventRecord {
  double time = 0.0;
  AsepEvent type = AsepEvent::kJumpRight;
  std::int32_t site = 0;  // bond index for jumps, site index for reservoirs
};

enum class AsepInit { kEmpty, kBernoulliHalf, kFull, kExplicit };

// Half-line truncation windows. Information spreads at Poisson-clock speed,
// so t + 6 sqrt(t) + 50 buffers the horizon down to ~1e-9 leak probability.
inline int narrow_wedge_window(double t_max) {
  return static_cast<int>(std::ceil(t_max + 6.0 * std::sqrt(t_max) + 50.0)) + 2;
}
inline int bernoulli_window(double epsilon, double X_max, double t_max) {
  return static_cast<int>(std::ceil(X_max / epsilon)) + narrow_wedge_window(t_max);
}

namespace detail {

// Constant-time membership set over bond indices with uniform sampling.
class IndexedSet {
 public:
  explicit IndexedSet(int capacity) : pos_(static_cast<std::size_t>(capacity) + 1, -1) {}
  int size() const { return static_cast<int>(items_.size()); }
  bool contains(int b) const { return pos_[static_cast<std::size_t>(b)] >= 0; }
  void insert(int b) {
    if (contains(b)) return;
    pos_[static_cast<std::size_t>(b)] = static_cast<int>(items_.size());
    items_.push_back(b);
  }
  void erase(int b) {
    const int p = pos_[static_cast<std::size_t>(b)];
    if (p < 0) return;
    const int last = items_.back();
    items_[static_cast<std::size_t>(p)] = last;
    pos_[static_cast<std::size_t>(last)] = p;
    items_.pop_back();
    pos_[static_cast<std::size_t>(b)] = -1;
  }
  int at(std::uint64_t i) const { return items_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<int> pos_;
  std::vector<int> items_;
};

}  // namespace detail

class AsepState {
 public:
  // window_L: number of simulated sites (1..window_L). For the interval
  // geometry this must be params.N; for the half-line it is the truncation
  // window (overflow is flagged when site window_L - 1 gets occupied).
  AsepState(const ScalingParams& params, AsepInit init, int window_L,
            std::uint64_t master_seed, std::uint64_t replica_index,
            const std::vector<std::uint8_t>& explicit_occ = {})
      : params_(params),
        L_(window_L),
        rng_(master_seed, replica_index),
        right_bonds_(window_L),
        left_bonds_(window_L) {
    if (params.is_interval() && window_L != params.N) {
      throw std::invalid_argument("asep: interval window must equal N");
    }
    if (window_L < 2) throw std::invalid_argument("asep: window too small");
    occ_.assign(static_cast<std::size_t>(L_) + 2, 0);
    // The truncation-window rejection protocol applies to the empty
    // (narrow-wedge) start on the half-line; other starts size the window
    // with an influence buffer instead.
    overflow_armed_ = !params_.is_interval() && init == AsepInit::kEmpty;
    switch (init) {
      case AsepInit::kEmpty:
        break;
      case AsepInit::kFull:
        for (int x = 1; x <= L_; ++x) occ_[static_cast<std::size_t>(x)] = 1;
        break;
      case AsepInit::kBernoulliHalf:
        for (int x = 1; x <= L_; ++x) {
          occ_[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(rng_.next_u64() & 1u);
        }
        break;
      case AsepInit::kExplicit:
        if (static_cast<int>(explicit_occ.size()) != L_) {
          throw std::invalid_argument("asep: explicit occupation has wrong length");
        }
        for (int x = 1; x <= L_; ++x) occ_[static_cast<std::size_t>(x)] = explicit_occ[x - 1];
        break;
    }
    for (int b = 1; b <= L_ - 1; ++b) refresh_bond(b);
  }

  const ScalingParams& params() const { return params_; }
  int window() const { return L_; }
  double clock() const { return clock_; }
  std::int64_t h0() const { return h0_; }
  bool overflowed() const { return overflowed_; }
  std::uint64_t event_count() const { return event_count_; }
  std::int64_t creations() const { return creations_; }
  std::int64_t annihilations() const { return annihilations_; }
  bool occupied(int x) const { return occ_[static_cast<std::size_t>(x)] != 0; }

  // Spin value in {-1,+1}.
  int eta(int x) const { return occupied(x) ? 1 : -1; }

  // h(x) = h(0) + sum_{j<=x} eta(j); O(x) scan.
  std::int64_t height(int x) const {
    std::int64_t h = h0_;
    for (int j = 1; j <= x; ++j) h += eta(j);
    return h;
  }

  std::vector<std::int64_t> height_profile(int x_max) const {
    std::vector<std::int64_t> h(static_cast<std::size_t>(x_max) + 1);
    h[0] = h0_;
    for (int x = 1; x <= x_max; ++x) h[static_cast<std::size_t>(x)] = h[x - 1] + eta(x);
    return h;
  }

  int rightmost_particle() const {
    for (int x = L_; x >= 1; --x) {
      if (occupied(x)) return x;
    }
    return 0;
  }

  // Sum of all enabled rates.
  double total_rate() const {
    double r = params_.p * right_bonds_.size() + params_.q * left_bonds_.size();
    r += occupied(1) ? params_.gamma : params_.alpha;
    if (params_.is_interval()) r += occupied(L_) ? params_.beta : params_.delta;
    return r;
  }

  double bulk_rate() const {
    return params_.p * right_bonds_.size() + params_.q * left_bonds_.size();
  }

  // Advance by one event. If the event would land past t_limit, the clock
  // stops at t_limit instead and nothing is applied (exponential clocks
  // restart memorylessly). Returns whether an event was applied.
  bool step(double t_limit, AsepEventRecord* out = nullptr) {
    if (overflowed_) throw std::runtime_error("asep: stepping an overflowed replica");
    const double R = total_rate();
    if (R <= 0.0) {
      clock_ = t_limit;
      return false;
    }
    const double tau = rng_.exponential(R);
    if (clock_ + tau > t_limit) {
      clock_ = t_limit;
      return false;
    }
    clock_ += tau;

    AsepEventRecord ev;
    ev.time = clock_;
    const double u = rng_.u01() * R;
    const double pr = params_.p * right_bonds_.size();
    const double ql = params_.q * left_bonds_.size();
    if (u < pr) {
      const int b = right_bonds_.at(rng_.uniform_below(right_bonds_.size()));
      ev.type = AsepEvent::kJumpRight;
      ev.site = b;
    } else if (u < pr + ql) {
      const int b = left_bonds_.at(rng_.uniform_below(left_bonds_.size()));
      ev.type = AsepEvent::kJumpLeft;
      ev.site = b;
    } else if (!params_.is_interval() || u < pr + ql + (occupied(1) ? params_.gamma : params_.alpha)) {
      ev.type = occupied(1) ? AsepEvent::kAnnihilateLeft : AsepEvent::kCreateLeft;
      ev.site = 1;
    } else {
      ev.type = occupied(L_) ? AsepEvent::kAnnihilateRight : AsepEvent::kCreateRight;
      ev.site = L_;
    }
    // Spot audit (~1% of events): the sampled event's rate recomputed from
    // scratch from the +-1 occupation formulas, against the catalog rate,
    // on the pre-application configuration.
    if (event_count_ % 97 == 0) {
      ++audit_count_;
      if (std::abs(rate_from_formula(ev) - rate_from_catalog(ev)) >
          1e-12 * rate_from_catalog(ev)) {
        ++audit_failures_;
      }
    }
    apply(ev);
    if (out) *out = ev;
    return true;
  }

  std::uint64_t audit_count() const { return audit_count_; }
  std::uint64_t audit_failures() const { return audit_failures_; }

  void run_until(double t_target) {
    while (clock_ < t_target && !overflowed_) {
      step(t_target);
    }
  }

  // Rate of a hypothetical event recomputed from scratch from the +-1
  // occupation formulas; the audit hook for sampled events.
  double rate_from_formula(const AsepEventRecord& ev) const {
    const auto spin = [&](int x) { return static_cast<double>(eta(x)); };
    switch (ev.type) {
      case AsepEvent::kJumpRight:
        return params_.p / 4.0 * (1.0 + spin(ev.site)) * (1.0 - spin(ev.site + 1));
      case AsepEvent::kJumpLeft:
        return params_.q / 4.0 * (1.0 - spin(ev.site)) * (1.0 + spin(ev.site + 1));
      case AsepEvent::kCreateLeft:
        return params_.alpha / 2.0 * (1.0 - spin(1));
      case AsepEvent::kAnnihilateLeft:
        return params_.gamma / 2.0 * (1.0 + spin(1));
      case AsepEvent::kCreateRight:
        return params_.delta / 2.0 * (1.0 - spin(L_));
      case AsepEvent::kAnnihilateRight:
        return params_.beta / 2.0 * (1.0 + spin(L_));
    }
    return 0.0;
  }

  // Catalog rate of the event class the sampler believed it drew.
  double rate_from_catalog(const AsepEventRecord& ev) const {
    switch (ev.type) {
      case AsepEvent::kJumpRight:
        return params_.p;
      case AsepEvent::kJumpLeft:
        return params_.q;
      case AsepEvent::kCreateLeft:
        return params_.alpha;
      case AsepEvent::kAnnihilateLeft:
        return params_.gamma;
      case AsepEvent::kCreateRight:
        return params_.delta;
      case AsepEvent::kAnnihilateRight:
        return params_.beta;
    }
    return 0.0;
  }

 private:
  void refresh_bond(int b) {
    if (b < 1 || b > L_ - 1) return;
    const bool o1 = occupied(b), o2 = occupied(b + 1);
    if (o1 && !o2) {
      right_bonds_.insert(b);
    } else {
      right_bonds_.erase(b);
    }
    if (!o1 && o2) {
      left_bonds_.insert(b);
    } else {
      left_bonds_.erase(b);
    }
  }

  void apply(const AsepEventRecord& ev) {
    ++event_count_;
    switch (ev.type) {
      case AsepEvent::kJumpRight: {
        occ_[static_cast<std::size_t>(ev.site)] = 0;
        occ_[static_cast<std::size_t>(ev.site) + 1] = 1;
        if (overflow_armed_ && ev.site + 1 >= L_ - 1) overflowed_ = true;
        break;
      }
      case AsepEvent::kJumpLeft: {
        occ_[static_cast<std::size_t>(ev.site)] = 1;
        occ_[static_cast<std::size_t>(ev.site) + 1] = 0;
        break;
      }
      case AsepEvent::kCreateLeft: {
        occ_[1] = 1;
        h0_ -= 2;
        ++creations_;
        break;
      }
      case AsepEvent::kAnnihilateLeft: {
        occ_[1] = 0;
        h0_ += 2;
        ++annihilations_;
        break;
      }
      case AsepEvent::kCreateRight: {
        occ_[static_cast<std::size_t>(L_)] = 1;
        break;
      }
      case AsepEvent::kAnnihilateRight: {
        occ_[static_cast<std::size_t>(L_)] = 0;
        break;
      }
    }
    refresh_bond(ev.site - 1);
    refresh_bond(ev.site);
    refresh_bond(ev.site + 1);
  }

  ScalingParams params_;
  int L_;
  Philox rng_;
  std::vector<std::uint8_t> occ_;  // occ_[1..L]; occ_[0], occ_[L+1] unused
  detail::IndexedSet right_bonds_;
  detail::IndexedSet left_bonds_;
  double clock_ = 0.0;
  std::int64_t h0_ = 0;
  std::int64_t creations_ = 0;
  std::int64_t annihilations_ = 0;
  std::uint64_t event_count_ = 0;
  std::uint64_t audit_count_ = 0;
  std::uint64_t audit_failures_ = 0;
  bool overflowed_ = false;
  bool overflow_armed_ = false;
};

// ---------------------------------------------------------------------------
// Exponential-transform fields.
// ---------------------------------------------------------------------------

enum class GartnerNormalization { kStandard, kNarrowWedge };

// Z(x) = norm * e^{sqrt(eps) h(x) + nu t}; narrow wedge multiplies by
// rho_norm eps^{-1/2}.
struct GartnerField {
  std::vector<double> values;  // index x = 0..x_max
  double t = 0.0;
  GartnerNormalization normalization = GartnerNormalization::kStandard;
};

inline double gartner_prefactor(const ScalingParams& p, GartnerNormalization norm) {
  return norm == GartnerNormalization::kNarrowWedge ? p.rho_norm / p.sqrt_epsilon : 1.0;
}

inline GartnerField gartner_field(const AsepState& state, GartnerNormalization norm, int x_max) {
  const ScalingParams& p = state.params();
  GartnerField f;
  f.t = state.clock();
  f.normalization = norm;
  const double pref = gartner_prefactor(p, norm) * std::exp(p.nu * state.clock());
  const auto h = state.height_profile(x_max);
  f.values.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    f.values[i] = pref * std::exp(p.sqrt_epsilon * static_cast<double>(h[i]));
  }
  return f;
}

// Macroscopic field value Z_{eps^{-2}T}(eps^{-1}X), linearly interpolated
// in X between lattice points.
inline double macroscopic_value(const GartnerField& f, const ScalingParams& p, double X) {
  const double xr = X / p.epsilon;
  const int x0 = static_cast<int>(std::floor(xr));
  const double fx = xr - x0;
  if (x0 < 0 || x0 + 1 >= static_cast<int>(f.values.size())) {
    throw std::out_of_range("macroscopic_value: X outside the recorded window");
  }
  return (1.0 - fx) * f.values[static_cast<std::size_t>(x0)] +
         fx * f.values[static_cast<std::size_t>(x0) + 1];
}

// H^eps(T,X) = sqrt(eps) h_{eps^{-2}T}(eps^{-1}X) + (eps^{-1}/2 + 1/24) T,
// minus (1/2) log eps for narrow-wedge runs; h linearly interpolated.
// The centering sign follows the height orientation here (grad+ h =
// eta(x+1), so the dominant right jumps push h down and sqrt(eps) h drifts
// like -T/(2 eps)); with it, H - log Z = (nu - eps/2 - eps^2/24) eps^{-2} T
// is O(eps T) under the standard normalization.
inline double height_process_H(const AsepState& state, double T, double X, bool narrow_wedge) {
  const ScalingParams& p = state.params();
  const double xr = X / p.epsilon;
  const int x0 = static_cast<int>(std::floor(xr));
  const double fx = xr - x0;
  const double h =
      (1.0 - fx) * static_cast<double>(state.height(x0)) +
      fx * static_cast<double>(state.height(x0 + 1));
  double H = p.sqrt_epsilon * h + (0.5 / p.epsilon + 1.0 / 24.0) * T;
  if (narrow_wedge) H -= 0.5 * std::log(p.epsilon);
  return H;
}

}  // namespace kpzlab
