#pragma once

// Monte Carlo acceptance criteria (6-10): particle-system correctness,
// SHE moments, the weak-form martingale statistic, cross-model convergence
// trends, and the edge-statistics self-consistency chain.

#include <kpzlab/acceptance_kernel.hpp>
#include <kpzlab/asep.hpp>
#include <kpzlab/asep_martingale.hpp>
#include <kpzlab/continuum.hpp>
#include <kpzlab/goe.hpp>
#include <kpzlab/she.hpp>
#include <kpzlab/she_stats.hpp>
#include <kpzlab/stats.hpp>

#include <cmath>
#include <sstream>
#include <vector>

namespace kpzlab {

struct McProfile {
  std::uint64_t replicas = 10000;
  int workers = 0;
  std::uint64_t seed = 20260809;
};

// --------------------------------------------------------------------------
// Criterion 6: ASEP correctness. Rate audit, Poisson domination, martingale
// z-scores at the full ensemble size, bracket deviation decreasing over
// eps in {0.1, 0.05, 0.025}.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_asep(const McProfile& prof = {}) {
  std::vector<CheckResult> out;

  // Rate audit + Poisson domination on a narrow-wedge ensemble, eps=0.05,
  // microscopic horizon t = eps^{-2} * 0.5 = 200.
  {
    const ScalingParams p = build_half_line(0.05, -0.5);
    const double t_end = 200.0;
    const int L = narrow_wedge_window(t_end);
    std::vector<std::int64_t> rightmost(prof.replicas);
    std::vector<std::uint64_t> audits(prof.replicas), fails(prof.replicas), overflows(prof.replicas);
    parallel_replicas(prof.replicas, prof.workers, [&](std::uint64_t r) {
      AsepState s(p, AsepInit::kEmpty, L, prof.seed, r);
      s.run_until(t_end);
      rightmost[r] = s.rightmost_particle();
      audits[r] = s.audit_count();
      fails[r] = s.audit_failures();
      overflows[r] = s.overflowed() ? 1 : 0;
    });
    std::uint64_t a = 0, f = 0, o = 0;
    for (std::uint64_t r = 0; r < prof.replicas; ++r) {
      a += audits[r];
      f += fails[r];
      o += overflows[r];
    }
    std::ostringstream note;
    note << a << " events audited, " << o << " overflows";
    out.push_back(check_flag("rate audit: 100% of sampled audits match the closed forms",
                             a > 0 && f == 0 && o == 0, note.str()));
    const auto ks = poisson_domination_ks(rightmost, t_end, 0.01);
    out.push_back(check_below("rightmost particle vs Poisson(t), one-sided KS statistic",
                              ks.statistic, ks.critical));
  }

  // Martingale mean-increment and bracket z-scores at the full size.
  {
    const double eps = 0.025;
    const ScalingParams p = build_half_line(eps, -0.5);
    const double t_end = 0.5 / (eps * eps);
    const int L = bernoulli_window(eps, 0.0, t_end) + 10;
    const auto stats =
        run_martingale_ensemble(p, AsepInit::kBernoulliHalf, L,
                                {0.25 * t_end, 0.5 * t_end, 0.75 * t_end, t_end}, {0, 1, 5},
                                prof.replicas, prof.seed + 1, prof.workers);
    out.push_back(check_below("martingale mean-increment |z| (eps=0.025, T<=0.5)",
                              stats.max_increment_z(), 4.0));
    out.push_back(check_below("empirical vs predictable bracket |z|",
                              stats.max_bracket_gap_z(), 4.0));
    out.push_back(check_below("cross-site increment covariation |z|", stats.max_cross_z(), 4.0));
  }

  // Bracket deviation decreasing along the eps ladder (interior site).
  {
    std::vector<double> devs;
    std::uint64_t sub = prof.replicas;
    for (double eps : {0.1, 0.05, 0.025}) {
      const ScalingParams p = build_half_line(eps, -0.5);
      const double t_end = 0.5 / (eps * eps);
      const int L = bernoulli_window(eps, 0.0, t_end) + 10;
      const auto stats = run_martingale_ensemble(p, AsepInit::kBernoulliHalf, L, {t_end},
                                                 {1, 4}, sub, prof.seed + 2, prof.workers);
      devs.push_back(stats.relative_deviation(0));
    }
    std::ostringstream note;
    note << "deviations: " << devs[0] << " -> " << devs[1] << " -> " << devs[2];
    out.push_back(check_flag("bracket asymptotic-form deviation decreasing over eps ladder",
                             devs[1] < devs[0] && devs[2] < devs[1], note.str()));
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 7: SHE moments against the oracles.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_she_moments(const McProfile& prof = {}) {
  std::vector<CheckResult> out;
  SheGrid g(-0.5, 0.0, 1.0, 0.05, 0.00125);
  const Eigen::VectorXd Z0 = Eigen::VectorXd::Ones(g.sites());
  const std::vector<double> Ts{0.25, 0.5};
  const auto stats = run_she_ensemble(g, Z0, Ts, prof.replicas, prof.seed + 11, prof.workers);

  {
    double worst = 0.0;
    for (std::size_t j = 0; j < Ts.size(); ++j) {
      const Eigen::VectorXd m = she_first_moment(g, Z0, Ts[j]);
      for (int x = 0; x < g.sites(); ++x) {
        const auto& s = stats.field[j][static_cast<std::size_t>(x)];
        worst = std::max(worst, std::abs(s.mean() - m(x)) / s.se());
      }
    }
    out.push_back(check_below("ensemble mean vs first-moment oracle, max |z| over grid",
                              worst, 3.0));
  }
  {
    double worst = 0.0;
    for (std::size_t j = 0; j < Ts.size(); ++j) {
      const Eigen::MatrixXd M = she_exact_second_moment(g, Z0, Ts[j]);
      for (int x = 0; x < g.sites(); ++x) {
        const auto& s = stats.field_second[j][static_cast<std::size_t>(x)];
        worst = std::max(worst, std::abs(s.mean() - M(x, x)) / s.se());
      }
    }
    out.push_back(check_below("MC second moment vs exact recursion, max |z| over grid",
                              worst, 3.0));
  }
  {
    // Volterra oracle vs exact recursion: relative gap contracts by < 0.7
    // per dt halving at fixed dx.
    const double T = 0.5;
    const auto v = she_volterra_second_moment(g, Z0, T, 400);
    const Eigen::VectorXd vT = v.back();
    std::vector<double> gaps;
    for (double dt : {0.00125, 0.000625, 0.0003125}) {
      SheGrid gd(-0.5, 0.0, 1.0, 0.05, dt);
      const Eigen::MatrixXd Md = she_exact_second_moment(gd, Z0, T);
      double gap = 0.0;
      for (int x = 0; x < g.sites(); ++x) {
        gap = std::max(gap, std::abs(Md(x, x) - vT(x)) / vT(x));
      }
      gaps.push_back(gap);
    }
    const double r1 = gaps[1] / gaps[0], r2 = gaps[2] / gaps[1];
    std::ostringstream note;
    note << "gaps " << gaps[0] << " -> " << gaps[1] << " -> " << gaps[2];
    out.push_back(check_below("Volterra vs exact recursion, worst contraction ratio per halving",
                              std::max(r1, r2), 0.7, note.str()));
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 8: weak-form martingale statistic across boundary parameters
// and geometries; all Y and Q increment z-scores within +-4.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_martingale_problem(const McProfile& prof = {}) {
  std::vector<CheckResult> out;
  const std::vector<double> T_grid{0.125, 0.25, 0.375, 0.5};
  double worst = 0.0;
  std::string worst_cfg;
  for (double A : {-0.5, 0.0, 1.0}) {
    {
      SheGrid g(A, A, 1.0, 0.05, 0.00125);
      const auto phi = RobinTestFunction::interval(A, A);
      const auto st = run_she_martingale(g, Eigen::VectorXd::Ones(g.sites()), T_grid, {phi},
                                         prof.replicas, prof.seed + 21, prof.workers);
      if (st.max_abs_z() > worst) {
        worst = st.max_abs_z();
        worst_cfg = "interval A=B=" + std::to_string(A);
      }
    }
    {
      SheGrid g(A, 0.0, 4.0, 0.05, 0.00125);
      const auto phi = RobinTestFunction::half_line(A, 0.2, 1.4);
      const auto st = run_she_martingale(g, Eigen::VectorXd::Ones(g.sites()), T_grid, {phi},
                                         prof.replicas, prof.seed + 22, prof.workers);
      if (st.max_abs_z() > worst) {
        worst = st.max_abs_z();
        worst_cfg = "half-line A=" + std::to_string(A);
      }
    }
  }
  out.push_back(check_below("martingale-problem Y/Q increment |z|, all configurations", worst,
                            4.0, worst_cfg));
  return out;
}

// --------------------------------------------------------------------------
// Criterion 9: convergence trends. Narrow-wedge mean toward the continuum
// kernel, strictly decreasing over eps in {0.1, 0.05, 0.025}; one-point KS
// distance between the particle system and the SHE decreasing, final < 0.1.
// --------------------------------------------------------------------------
struct TrendReport {
  std::vector<double> eps;
  std::vector<double> mean_gap;
  std::vector<double> ks;
};

inline TrendReport narrow_wedge_trend(double A, double T, double X, std::uint64_t replicas,
                                      std::uint64_t seed, int workers, double she_dx,
                                      std::vector<double>* she_samples_out = nullptr) {
  TrendReport rep;
  rep.eps = {0.1, 0.05, 0.025};

  // Continuum target P_T(X, 0) by Richardson extrapolation.
  auto ck = ContinuumKernel::half_line(A, 1.0 / 16, 4);
  const double target = ck(T, X, 0.0).value;

  // SHE reference samples (delta data) at the fixed fine grid.
  const double x_top = she_dx * std::ceil((X + 8.0 * std::sqrt(T) + 1.0) / she_dx);
  SheGrid g(A, 0.0, x_top, she_dx, she_dx * she_dx / 2.0);
  std::vector<std::vector<double>> store;
  const int probe = static_cast<int>(std::lround(X / she_dx));
  run_she_ensemble(g, g.delta0(), {T}, replicas, seed + 31, workers, &store, probe);
  const std::vector<double>& she_samples = store[0];
  if (she_samples_out) *she_samples_out = she_samples;

  for (double eps : rep.eps) {
    const ScalingParams p = build_half_line(eps, A);
    const double t_end = T / (eps * eps);
    const int L = narrow_wedge_window(t_end);
    std::vector<double> z_vals(replicas);
    parallel_replicas(replicas, workers, [&](std::uint64_t r) {
      AsepState s(p, AsepInit::kEmpty, L, seed + 32, r);
      s.run_until(t_end);
      const auto f = gartner_field(s, GartnerNormalization::kNarrowWedge,
                                   std::min(L - 1, static_cast<int>(X / eps) + 2));
      z_vals[r] = macroscopic_value(f, p, X);
    });
    const Summary sum = reduce_summaries(z_vals);
    rep.mean_gap.push_back(std::abs(sum.mean() - target));
    rep.ks.push_back(ks_distance(z_vals, she_samples));
  }
  return rep;
}

inline std::vector<CheckResult> criterion_convergence_trends(const McProfile& prof = {}) {
  std::vector<CheckResult> out;
  const auto rep = narrow_wedge_trend(-0.5, 0.5, 0.2, prof.replicas, prof.seed, prof.workers,
                                      0.02);
  {
    std::ostringstream note;
    note << "mean gaps: " << rep.mean_gap[0] << " -> " << rep.mean_gap[1] << " -> "
         << rep.mean_gap[2];
    out.push_back(check_flag("narrow-wedge mean gap to continuum kernel strictly decreasing",
                             rep.mean_gap[1] < rep.mean_gap[0] &&
                                 rep.mean_gap[2] < rep.mean_gap[1],
                             note.str()));
  }
  {
    std::ostringstream note;
    note << "KS: " << rep.ks[0] << " -> " << rep.ks[1] << " -> " << rep.ks[2];
    out.push_back(check_flag("one-point KS distance decreasing over the eps ladder",
                             rep.ks[1] < rep.ks[0] && rep.ks[2] < rep.ks[1], note.str()));
    out.push_back(check_below("final KS distance", rep.ks[2], 0.1));
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 10: edge-statistics self-consistency and the cross-model
// Laplace comparison at T=1, A=-1/2. The tolerance is the combined MC
// error plus 3x the measured discretization and finite-n drifts.
// --------------------------------------------------------------------------
inline std::vector<CheckResult> criterion_goe(const McProfile& prof = {}) {
  std::vector<CheckResult> out;

  // Long-time table: gap decreasing and final gap < 2 combined errors.
  const auto sample = sample_goe_edge(1000, 32, prof.replicas, prof.seed + 41, prof.workers);
  {
    const auto rows = longtime_limit_table(sample, 0.0, {8.0, 64.0, 512.0}, 1.0);
    std::ostringstream note;
    note << "gaps: " << rows[0].gap_to_cdf << " -> " << rows[1].gap_to_cdf << " -> "
         << rows[2].gap_to_cdf;
    out.push_back(check_flag("long-time table gap to the empirical CDF decreasing",
                             rows[1].gap_to_cdf < rows[0].gap_to_cdf &&
                                 rows[2].gap_to_cdf < rows[1].gap_to_cdf,
                             note.str()));
    const auto cdf = goe_cdf(sample, 0.0);
    out.push_back(check_below("final long-time gap vs 2x combined error", rows[2].gap_to_cdf,
                              2.0 * (rows[2].mc_error + cdf.ci_halfwidth)));
  }

  // Cross-model Laplace comparison.
  {
    const double T = 1.0, A = -0.5;
    const double dx = 0.04;
    const double x_top = dx * std::ceil((8.0 * std::sqrt(T) + 1.0) / dx);
    SheGrid g(A, 0.0, x_top, dx, dx * dx / 2.0);
    std::vector<std::vector<double>> store;
    run_she_ensemble(g, g.delta0(), {T}, prof.replicas, prof.seed + 42, prof.workers, &store, 0);
    std::vector<double> h_samples;
    for (double z : store[0]) h_samples.push_back(std::log(std::max(z, 1e-300)));

    // Discretization drift: same estimate at dx/2 with a quarter of the
    // replicas (the drift is a mean difference; moderate MC error is fine).
    SheGrid g2(A, 0.0, x_top, dx / 2.0, dx * dx / 8.0);
    std::vector<std::vector<double>> store2;
    run_she_ensemble(g2, g2.delta0(), {T}, std::max<std::uint64_t>(prof.replicas / 4, 500),
                     prof.seed + 43, prof.workers, &store2, 0);
    std::vector<double> h2;
    for (double z : store2[0]) h2.push_back(std::log(std::max(z, 1e-300)));

    // Finite-n drift on the product side.
    const auto sample2 =
        sample_goe_edge(2000, 32, prof.replicas / 2, prof.seed + 44, prof.workers);

    for (double xi : {0.5, 1.0, 2.0}) {
      const auto lhs = she_laplace(h_samples, xi, T);
      const auto lhs_fine = she_laplace(h2, xi, T);
      const auto rhs = laplace_product(sample, xi, T);
      const auto rhs_n = laplace_product(sample2, xi, T);
      const double drift_dx = std::abs(lhs.estimate - lhs_fine.estimate);
      const double drift_n = std::abs(rhs.estimate - rhs_n.estimate);
      const double tol = lhs.mc_error + rhs.mc_error + 3.0 * (drift_dx + drift_n) +
                         (1.0 - rhs.truncation_low);
      std::ostringstream name, note;
      name << "she vs product Laplace at xi=" << xi;
      note << "lhs=" << lhs.estimate << " rhs=" << rhs.estimate << " drift(dx)=" << drift_dx
           << " drift(n)=" << drift_n;
      out.push_back(check_below(name.str(), std::abs(lhs.estimate - rhs.estimate), tol,
                                note.str()));
    }
  }
  return out;
}

}  // namespace kpzlab
