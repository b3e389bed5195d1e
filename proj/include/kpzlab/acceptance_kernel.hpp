#pragma once

// Kernel-side acceptance criteria (1-5): route agreement, exact identities,
// cancellation integrals, spectral structure, and the inequality suites.
// Every tolerance is pinned here, in code.

#include <kpzlab/continuum.hpp>
#include <kpzlab/estimates.hpp>
#include <kpzlab/kernel.hpp>
#include <kpzlab/rng.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace kpzlab {

struct CheckResult {
  std::string name;
  double statistic = 0.0;  // the measured quantity
  double tolerance = 0.0;  // what it must stay below (or beat)
  bool pass = false;
  std::string note;
};

inline CheckResult check_below(std::string name, double stat, double tol, std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.statistic = stat;
  c.tolerance = tol;
  c.pass = stat <= tol;
  c.note = std::move(note);
  return c;
}

inline CheckResult check_flag(std::string name, bool ok, std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.statistic = ok ? 0.0 : 1.0;
  c.tolerance = 0.0;
  c.pass = ok;
  c.note = std::move(note);
  return c;
}

// --------------------------------------------------------------------------
// Criterion 1: route agreement on 1000 random (t,x,y,A,B,eps) cases,
// max |difference| <= 1e-8.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_route_agreement(int cases = 1000) {
  const double tol = 1e-8;
  Philox rng(20260809, 1);
  const std::vector<double> ab_grid{-2.0, -0.5, 0.0, 0.5, 2.0};
  double worst = 0.0;
  std::string worst_note;

  // Cached heavy artifacts.
  std::map<std::pair<double, double>, std::shared_ptr<HalfLineKernel>> half_cache;
  struct IntervalKey {
    int N;
    double a, b;
    bool operator<(const IntervalKey& o) const {
      return std::tie(N, a, b) < std::tie(o.N, o.a, o.b);
    }
  };
  std::map<IntervalKey, std::shared_ptr<IntervalImageKernel>> rec_cache;

  for (int c = 0; c < cases; ++c) {
    const double eps = (rng.next_u64() & 1) ? 0.1 : 0.05;
    const double A = ab_grid[rng.uniform_below(ab_grid.size())];
    const bool interval = (rng.next_u64() & 1) != 0;
    const double t = (0.02 + 0.98 * rng.u01()) / (eps * eps);
    if (interval) {
      const int N = static_cast<int>(std::lround(1.0 / eps));
      const double Bp = ab_grid[rng.uniform_below(ab_grid.size())];
      const double muA = 1.0 - A * eps, muB = 1.0 - Bp * eps;
      const int x = static_cast<int>(rng.uniform_below(N + 1));
      const int y = static_cast<int>(rng.uniform_below(N + 1));
      auto& rec = rec_cache[IntervalKey{N, A, Bp}];
      if (!rec) {
        const int K = suggest_interval_K(N, 1.0 / (eps * eps), 1e-10, A, Bp);
        rec = std::make_shared<IntervalImageKernel>(N, muA, muB, K);
      }
      const double v_rec = rec->value(t, x, y, 1e-9);
      const double v_spec = shared_spectrum(N, muA, muB)->value(t, x, y);
      const double d = std::abs(v_rec - v_spec);
      if (d > worst) {
        worst = d;
        std::ostringstream os;
        os << "interval N=" << N << " A=" << A << " B=" << Bp << " t=" << t << " x=" << x
           << " y=" << y;
        worst_note = os.str();
      }
    } else {
      const double mu = 1.0 - A * eps;
      const int x = static_cast<int>(rng.uniform_below(24));
      const int y = static_cast<int>(rng.uniform_below(24));
      auto& hk = half_cache[{mu, 0.0}];
      if (!hk) hk = std::make_shared<HalfLineKernel>(mu);
      const double v_img = hk->value(t, x, y);
      const double v_ode = halfline_ode_oracle(t, x, y, mu, 1e-10);
      const double d = std::abs(v_img - v_ode);
      if (d > worst) {
        worst = d;
        std::ostringstream os;
        os << "half-line A=" << A << " eps=" << eps << " t=" << t << " x=" << x << " y=" << y;
        worst_note = os.str();
      }
    }
  }
  return {check_below("route agreement, " + std::to_string(cases) + " random cases, max |diff|",
                      worst, tol, worst_note)};
}

// --------------------------------------------------------------------------
// Criterion 2: exact identities.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_exact_identities() {
  std::vector<CheckResult> out;
  // Exponential-weight summation identity, residual <= 1e-10.
  {
    double worst = 0.0;
    for (double mu : {0.9, 1.0, 1.05}) {
      for (double t : {0.5, 5.0, 20.0, 50.0}) {
        for (std::int64_t x : {0, 2, 7}) {
          const auto g = generating_identity(t, x, mu, 1e-12);
          worst = std::max(worst, std::abs(g.lhs - g.rhs));
        }
      }
    }
    out.push_back(check_below("generating identity residual (mu in {0.9,1,1.05}, t<=50)",
                              worst, 1e-10));
  }
  // Mass-deficiency flux identity, residual <= 1e-6.
  {
    double worst = 0.0;
    HalfLineKernel k(1.05);
    for (double t : {1.0, 10.0, 100.0}) {
      worst = std::max(worst, mass_deficiency_half_line(k, t, 0).residual);
      worst = std::max(worst, mass_deficiency_half_line(k, t, 3).residual);
    }
    auto sp = shared_spectrum(16, 1.0 + 1.0 / 16, 1.0 - 2.0 / 16);
    for (double t : {2.0, 30.0}) {
      worst = std::max(worst, mass_deficiency_interval(*sp, t, 5).residual);
    }
    out.push_back(check_below("mass-deficiency flux identity residual", worst, 1e-6));
  }
  // Conservation at A=B=0, <= 1e-10.
  {
    double worst = 0.0;
    HalfLineKernel k(1.0);
    for (double t : {0.5, 7.0, 50.0}) {
      worst = std::max(worst, std::abs(k.mass(t, 0) - 1.0));
      worst = std::max(worst, std::abs(k.mass(t, 5) - 1.0));
    }
    auto sp = shared_spectrum(20, 1.0, 1.0);
    for (double t : {0.5, 7.0, 50.0}) {
      worst = std::max(worst, std::abs(sp->mass(t, 4) - 1.0));
    }
    out.push_back(check_below("conservation at A=B=0", worst, 1e-10));
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 3: cancellation identities and the c* bound.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_cancellation() {
  std::vector<CheckResult> out;
  {
    const auto on = signed_cancellation_half_line(2, 2);
    out.push_back(check_below("half-line signed integral, |value - 1| at x = xbar",
                              std::abs(on.value - 1.0), 2e-3));
    const auto off = signed_cancellation_half_line(2, 5);
    out.push_back(check_below("half-line signed integral, |value| at x != xbar",
                              std::abs(off.value), 2e-3));
  }
  {
    const int N = 16;
    auto sp = shared_spectrum(N, 1.0, 1.0);
    const auto ioff = signed_cancellation_interval(*sp, 3, 9, 600.0);
    out.push_back(check_below("interval signed integral, |value + 1/(N+1)| at N=16",
                              std::abs(ioff.value + 1.0 / (N + 1)), 2e-3));
    const auto ion = signed_cancellation_interval(*sp, 3, 3, 600.0);
    out.push_back(check_below("interval signed integral, |value - N/(N+1)| on-diagonal",
                              std::abs(ion.value - static_cast<double>(N) / (N + 1)), 2e-3));
  }
  {
    HalfLineKernel k(1.0);
    double worst = 0.0;
    for (int x : {1, 5, 20}) {
      worst = std::max(worst,
                       cancellation_absolute_half_line(k, x, 0.0, 0.05, 400.0).value);
    }
    out.push_back(check_below("absolute cancellation integral (c* bound), A=0, x in {1,5,20}",
                              worst, 1.0 - 1e-9, "must stay strictly below 1"));
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 4: spectral structure at N=200 (bands, positive counts), with
// N-ladder stability of the positive-eigenvalue constant and the
// eigenfunction sup bound.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_spectrum() {
  std::vector<CheckResult> out;
  const std::vector<double> grid{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  {
    bool all_bands = true;
    bool counts_ok = true;
    std::string bad;
    for (double A : grid) {
      for (double B : grid) {
        const int N = 200;
        RobinSpectrum sp(N, 1.0 - A / N, 1.0 - B / N);
        for (const auto& band : sp.bulk_bands()) {
          if (!band.occupied) {
            all_bands = false;
            bad = "band k=" + std::to_string(band.k);
          }
        }
        const double crit = A + B + A * B;
        const int pos = sp.positive_count(1e-9);
        if (crit < -1e-9 && pos < 1) counts_ok = false;
        if (crit > 1e-9 && pos != 0) counts_ok = false;
        if (std::abs(crit) <= 1e-9 && sp.min_abs_lambda() > 1e-8) counts_ok = false;
      }
    }
    out.push_back(check_flag("every bulk frequency inside its band (7x7 grid, N=200)",
                             all_bands, bad));
    out.push_back(check_flag("positive-eigenvalue count matches sign(A+B+AB)", counts_ok));
  }
  {
    // Positive eigenvalues <= C / N^2 with C stable across N.
    std::vector<double> Cs;
    for (int N : {100, 200, 400}) {
      RobinSpectrum sp(N, 1.0 + 0.5 / N, 1.0 + 0.5 / N);  // A=B=-1/2
      double lam = 0.0;
      for (int k = 0; k < sp.size(); ++k) lam = std::max(lam, sp.lambda(k));
      Cs.push_back(lam * N * N);
    }
    const double spread = *std::max_element(Cs.begin(), Cs.end()) /
                          *std::min_element(Cs.begin(), Cs.end());
    out.push_back(check_below("positive-eigenvalue constant spread across N in {100,200,400}",
                              spread, 2.0));
  }
  {
    double worst = 0.0;
    for (int N : {100, 200, 400}) {
      for (double A : {-1.0, 0.0, 2.0}) {
        RobinSpectrum sp(N, 1.0 - A / N, 1.0 - (-A) / N);
        worst = std::max(worst, sp.max_psi_inf() * std::sqrt(static_cast<double>(N)));
      }
    }
    out.push_back(check_below("eigenfunction sup bound ||psi||_inf sqrt(N)", worst, 3.0));
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 5: inequality suites with zero violations.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_inequalities() {
  std::vector<CheckResult> out;
  {
    HalfLineKernel k(1.05);
    auto val = [&](double t, int x, int y) { return k.value(t, x, y); };
    const auto r1 = monotone_domination_check(val, 1.0, 3.0, 60, 60);
    auto sp = shared_spectrum(24, 1.05, 0.95);
    auto ival = [&](double t, int x, int y) { return sp->value(t, x, y); };
    const auto r2 = monotone_domination_check(ival, 0.5, 4.0, 24, 24);
    out.push_back(check_below("semigroup domination worst violation",
                              std::max(r1.worst_violation, r2.worst_violation), 1e-12));
  }
  {
    const auto rep = expm_perturbation_check(20, -0.1, 500, 424242);
    out.push_back(check_below("matrix-exponential perturbation ratio (500 trials, dim 20)",
                              rep.max_ratio, 1.0 + 1e-10));
  }
  {
    int violations = 0;
    double fitted_K = 0.0;
    {
      HalfLineKernel k(1.05);  // A=-1, eps=0.05
      auto p = [&](double t) { return k.value(t, 2, 2); };
      std::vector<double> train, test;
      for (int i = 1; i <= 8; ++i) train.push_back(250.0 * i);
      for (int i = 9; i <= 16; ++i) test.push_back(250.0 * i);
      const auto fit = longtime_bound_check(p, train, test, 0.05);
      violations += fit.test_violations;
      fitted_K = fit.K;
    }
    {
      auto sp = shared_spectrum(20, 1.0, 1.0);
      auto p = [&](double t) { return sp->value(t, 4, 9); };
      std::vector<double> train, test;
      for (int i = 1; i <= 6; ++i) train.push_back(100.0 * i);
      for (int i = 7; i <= 12; ++i) test.push_back(100.0 * i);
      const auto fit = longtime_bound_check(p, train, test, 1.0 / 20);
      violations += fit.test_violations;
    }
    std::ostringstream note;
    note << "fitted K = " << fitted_K;
    out.push_back(check_flag("long-time envelope holds on held-out grids", violations == 0,
                             note.str()));
  }
  {
    // Short-time gradient facts for t <= 0.05, x >= 1.
    HalfLineKernel k(1.0);
    double worst_diag = -1.0, worst_off = 0.0;
    for (double t : {0.0, 0.01, 0.03, 0.05}) {
      for (int x : {1, 2, 5, 12, 30}) {
        const auto g = gradient_product_half_line(k, t, x, x);
        worst_diag = std::max(worst_diag, std::max(g.grad_plus, g.grad_minus));
        const auto h = gradient_product_half_line(k, t, x, x + 1);
        worst_off = std::max(worst_off, std::abs(h.grad_minus));
      }
    }
    out.push_back(check_below("short-time diagonal gradients (must be <= -4/5)",
                              worst_diag, -0.8));
    out.push_back(check_below("short-time off-diagonal gradient magnitude", worst_off, 0.2));
  }
  return out;
}

}  // namespace kpzlab
