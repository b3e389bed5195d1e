#pragma once

// Martingale diagnostics for the exponentially transformed height field.
// With Z_t(x) = e^{sqrt(eps) h_t(x) + nu t} (standard normalization),
//   M_t(x) = Z_t(x) - Z_0(x) - (1/2) int_0^t  Lap Z_s(x) ds
// is a pure-jump martingale; its predictable bracket integrates the
// event-catalog rates, and the asymptotic form eps Z^2 - grad-product is
// tracked alongside for the vanishing-deviation check.
//
// Everything between events is of the form (piecewise constant) * e^{nu s}
// or * e^{2 nu s}, so each integral telescopes: work happens only when an
// event touches a tracked neighborhood or a measurement closes a segment.

#include <kpzlab/asep.hpp>
#include <kpzlab/ensemble.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

namespace kpzlab {

class MartingaleTracker {
 public:
  MartingaleTracker(const AsepState& state, std::vector<int> sites)
      : sites_(std::move(sites)) {
    const ScalingParams& p = state.params();
    nu_ = p.nu;
    se_ = p.sqrt_epsilon;
    a2m_ = std::pow(std::exp(-2.0 * se_) - 1.0, 2);
    a2p_ = std::pow(std::exp(2.0 * se_) - 1.0, 2);
    slots_.resize(sites_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      refresh(state, i);
      slots_[i].Z0 = slots_[i].Gc;  // clock starts at 0, e^{nu*0} = 1
      slots_[i].last = 0.0;
    }
  }

  const std::vector<int>& sites() const { return sites_; }

  // Call after the state applied the event.
  void on_event(const AsepState& state, const AsepEventRecord& ev) {
    const int center = changed_height_site(state, ev);
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (std::abs(sites_[i] - center) <= 1) {
        accumulate(i, ev.time);
        refresh(state, i);
      }
    }
  }

  // Close all segments at the current clock (call before readout).
  void close_to(const AsepState& state) {
    for (std::size_t i = 0; i < sites_.size(); ++i) accumulate(i, state.clock());
  }

  struct Readout {
    double Z = 0.0;
    double M = 0.0;              // Z - Z0 - (1/2) int Lap Z
    double bracket_exact = 0.0;  // int d<M>/ds
    double bracket_approx = 0.0;
    double int_absdiff = 0.0;    // int |exact_rate - approx_rate| ds
    double int_epsZ2 = 0.0;      // int eps Z^2 ds
  };

  Readout readout(std::size_t i) const {
    const Slot& s = slots_[i];
    Readout r;
    r.Z = s.Gc * std::exp(nu_ * s.last);
    r.M = r.Z - s.Z0 - 0.5 * s.acc_drift;
    r.bracket_exact = s.acc_be;
    r.bracket_approx = s.acc_ba;
    r.int_absdiff = s.acc_ad;
    r.int_epsZ2 = s.acc_z2;
    return r;
  }

 private:
  struct Slot {
    double Gm = 0.0, Gc = 0.0, Gp = 0.0;  // e^{sqrt(eps) h} at x-1, x, x+1
    double Cd = 0.0;                      // Lap-Z combo coefficient
    double Ce = 0.0, Ca = 0.0, Cad = 0.0, Cz = 0.0;
    double Z0 = 0.0;
    double last = 0.0;
    double acc_drift = 0.0, acc_be = 0.0, acc_ba = 0.0, acc_ad = 0.0, acc_z2 = 0.0;
  };

  static int changed_height_site(const AsepState& state, const AsepEventRecord& ev) {
    switch (ev.type) {
      case AsepEvent::kJumpRight:
      case AsepEvent::kJumpLeft:
        return ev.site;
      case AsepEvent::kCreateLeft:
      case AsepEvent::kAnnihilateLeft:
        return 0;
      case AsepEvent::kCreateRight:
      case AsepEvent::kAnnihilateRight:
        return state.window();
    }
    return -10;
  }

  void accumulate(std::size_t i, double t) {
    Slot& s = slots_[i];
    if (t <= s.last) return;
    const double f1 = (std::exp(nu_ * t) - std::exp(nu_ * s.last)) / nu_;
    const double f2 =
        (std::exp(2.0 * nu_ * t) - std::exp(2.0 * nu_ * s.last)) / (2.0 * nu_);
    s.acc_drift += s.Cd * f1;
    s.acc_be += s.Ce * f2;
    s.acc_ba += s.Ca * f2;
    s.acc_ad += s.Cad * f2;
    s.acc_z2 += s.Cz * f2;
    s.last = t;
  }

  void refresh(const AsepState& state, std::size_t i) {
    const ScalingParams& p = state.params();
    const int x = sites_[i];
    const int N = state.window();
    Slot& s = slots_[i];
    const auto G = [&](int y) {
      return std::exp(se_ * static_cast<double>(state.height(y)));
    };
    s.Gc = G(x);
    s.Gm = x >= 1 ? G(x - 1) : 0.0;
    const bool at_right_edge = p.is_interval() && x == N;
    s.Gp = at_right_edge ? 0.0 : G(x + 1);

    const double eps = p.epsilon;
    if (x == 0) {
      s.Cd = s.Gp + (p.mu_A - 2.0) * s.Gc;
      const double rate = state.occupied(1) ? a2p_ * p.gamma : a2m_ * p.alpha;
      s.Ce = s.Gc * s.Gc * rate;
      s.Ca = eps * s.Gc * s.Gc;
    } else if (at_right_edge) {
      s.Cd = s.Gm + (p.mu_B - 2.0) * s.Gc;
      const double rate = state.occupied(N) ? a2m_ * p.beta : a2p_ * p.delta;
      s.Ce = s.Gc * s.Gc * rate;
      s.Ca = eps * s.Gc * s.Gc;
    } else {
      s.Cd = s.Gp + s.Gm - 2.0 * s.Gc;
      double rate = 0.0;
      if (state.occupied(x) && !state.occupied(x + 1)) rate = a2m_ * p.p;
      if (!state.occupied(x) && state.occupied(x + 1)) rate = a2p_ * p.q;
      s.Ce = s.Gc * s.Gc * rate;
      s.Ca = eps * s.Gc * s.Gc - (s.Gp - s.Gc) * (s.Gc - s.Gm);
    }
    s.Cz = eps * s.Gc * s.Gc;
    s.Cad = std::abs(s.Ce - s.Ca);
  }

  std::vector<int> sites_;
  std::vector<Slot> slots_;
  double nu_ = 0.0, se_ = 0.0, a2m_ = 0.0, a2p_ = 0.0;
};

// ---------------------------------------------------------------------------
// Ensemble sweep: per (site, grid interval) statistics of the martingale
// increments, the empirical-vs-predictable bracket gap, the cross increment
// product of the first two sites, and the bracket-approximation deviation.
// ---------------------------------------------------------------------------

struct MartingaleEnsembleStats {
  std::vector<double> t_grid;
  std::vector<int> sites;
  // [site][interval]
  std::vector<std::vector<Summary>> increment;        // E[dM] -> 0
  std::vector<std::vector<Summary>> bracket_gap;      // E[(dM)^2 - d<M>] -> 0
  std::vector<Summary> cross_increment;               // E[dM(x0) dM(x1)] -> 0
  std::vector<Summary> int_absdiff;                   // per site, over [0, T_max]
  std::vector<Summary> int_epsZ2;

  double max_increment_z() const {
    double z = 0.0;
    for (const auto& row : increment) {
      for (const auto& s : row) z = std::max(z, std::abs(s.zscore()));
    }
    return z;
  }
  double max_bracket_gap_z() const {
    double z = 0.0;
    for (const auto& row : bracket_gap) {
      for (const auto& s : row) z = std::max(z, std::abs(s.zscore()));
    }
    return z;
  }
  double max_cross_z() const {
    double z = 0.0;
    for (const auto& s : cross_increment) z = std::max(z, std::abs(s.zscore()));
    return z;
  }
  // Deviation metric for the eps -> 0 bracket comparison at one site.
  double relative_deviation(std::size_t site_idx) const {
    const double denom = int_epsZ2[site_idx].mean();
    return denom > 0.0 ? int_absdiff[site_idx].mean() / denom : 0.0;
  }
};

inline MartingaleEnsembleStats run_martingale_ensemble(
    const ScalingParams& params, AsepInit init, int window_L, const std::vector<double>& t_grid,
    const std::vector<int>& sites, std::uint64_t replicas, std::uint64_t master_seed,
    int workers) {
  const std::size_t ns = sites.size();
  const std::size_t ni = t_grid.size();
  // Flattened per-replica storage, filled in parallel, reduced in order.
  std::vector<double> dM(replicas * ns * ni), gap(replicas * ns * ni);
  std::vector<double> cross(replicas * ni, 0.0);
  std::vector<double> ad(replicas * ns), z2(replicas * ns);

  parallel_replicas(replicas, workers, [&](std::uint64_t r) {
    AsepState state(params, init, window_L, master_seed, r);
    MartingaleTracker tracker(state, sites);
    std::vector<double> prevM(ns, 0.0), prevB(ns, 0.0);
    AsepEventRecord ev;
    double prev_t = 0.0;
    for (std::size_t j = 0; j < ni; ++j) {
      const double T = t_grid[j];
      while (state.clock() < T && !state.overflowed()) {
        if (state.step(T, &ev)) tracker.on_event(state, ev);
      }
      tracker.close_to(state);
      std::vector<double> dm_here(ns);
      for (std::size_t i = 0; i < ns; ++i) {
        const auto ro = tracker.readout(i);
        dm_here[i] = ro.M - prevM[i];
        dM[(r * ns + i) * ni + j] = dm_here[i];
        gap[(r * ns + i) * ni + j] =
            dm_here[i] * dm_here[i] - (ro.bracket_exact - prevB[i]);
        prevM[i] = ro.M;
        prevB[i] = ro.bracket_exact;
        if (j + 1 == ni) {
          ad[r * ns + i] = ro.int_absdiff;
          z2[r * ns + i] = ro.int_epsZ2;
        }
      }
      if (ns >= 2) cross[r * ni + j] = dm_here[0] * dm_here[1];
      prev_t = T;
    }
    (void)prev_t;
  });

  MartingaleEnsembleStats out;
  out.t_grid = t_grid;
  out.sites = sites;
  out.increment.assign(ns, std::vector<Summary>(ni));
  out.bracket_gap.assign(ns, std::vector<Summary>(ni));
  out.cross_increment.assign(ni, Summary{});
  out.int_absdiff.assign(ns, Summary{});
  out.int_epsZ2.assign(ns, Summary{});
  for (std::uint64_t r = 0; r < replicas; ++r) {
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = 0; j < ni; ++j) {
        out.increment[i][j].add(dM[(r * ns + i) * ni + j]);
        out.bracket_gap[i][j].add(gap[(r * ns + i) * ni + j]);
      }
      out.int_absdiff[i].add(ad[r * ns + i]);
      out.int_epsZ2[i].add(z2[r * ns + i]);
    }
    if (ns >= 2) {
      for (std::size_t j = 0; j < ni; ++j) out.cross_increment[j].add(cross[r * ni + j]);
    }
  }
  return out;
}

}  // namespace kpzlab
