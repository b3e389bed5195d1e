#include <catch2/catch_amalgamated.hpp>

#include <kpzlab/she.hpp>
#include <kpzlab/stats.hpp>
#include <kpzlab/she_stats.hpp>

#include <cmath>

using namespace kpzlab;

TEST_CASE("grid construction and propagator conservation") {
  SheGrid g(0.0, 0.0, 1.0, 0.05, 0.05 * 0.05 / 2.0);
  CHECK(g.sites() == 21);
  // Rows of the A=B=0 propagator sum to 1.
  const auto& P = g.propagator();
  for (int i = 0; i < g.sites(); ++i) {
    CHECK(P.row(i).sum() == Catch::Approx(1.0).margin(1e-12));
  }
  CHECK_THROWS_AS(SheGrid(0.0, 0.0, 1.0, 0.05, 0.01), std::invalid_argument);
}

TEST_CASE("zero-noise mode reduces to exact heat flow") {
  SheGrid g(-0.5, 1.0, 1.0, 0.1, 0.005);
  const Eigen::VectorXd Z0 = g.project([](double X) { return 1.0 + 0.3 * X; });
  const auto traj = she_solve(g, Z0, {0.25, 0.5}, 7, 0, 0.0);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const Eigen::VectorXd ref = she_first_moment(g, Z0, traj.times[j]);
    CHECK((traj.fields[j] - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero initial data stays zero for any seed") {
  SheGrid g(1.0, 0.0, 1.0, 0.1, 0.005);
  const Eigen::VectorXd Z0 = Eigen::VectorXd::Zero(g.sites());
  for (std::uint64_t seed : {1ull, 9ull}) {
    const auto traj = she_solve(g, Z0, {0.5}, seed, 3);
    CHECK(traj.fields[0].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("ensemble mean matches the first-moment oracle (delta data)") {
  SheGrid g(-0.5, 0.0, 2.0, 0.1, 0.005);
  const Eigen::VectorXd Z0 = g.delta0();
  const std::vector<double> Ts{0.3};
  const auto stats = run_she_ensemble(g, Z0, Ts, 4000, 99, 2);
  const Eigen::VectorXd oracle = she_first_moment(g, Z0, Ts[0]);
  int checked = 0;
  for (int x = 0; x < g.sites(); ++x) {
    const auto& s = stats.field[0][static_cast<std::size_t>(x)];
    if (s.se() > 0.0) {
      CHECK(std::abs(s.mean() - oracle(x)) < 4.0 * s.se() + 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 10);
  CHECK(static_cast<double>(stats.negative_points) <
        std::max(1.0, 1e-3 * static_cast<double>(stats.total_points)));
  // Delta data renders as 1/dx at the boundary site.
  CHECK(Z0(0) == Catch::Approx(1.0 / g.dx()));
  CHECK(Z0.sum() * g.dx() == Catch::Approx(1.0));
}

TEST_CASE("first-moment oracle: conservation and linearity") {
  SheGrid g(0.0, 0.0, 1.0, 0.05, 0.00125);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.sites());
  const Eigen::VectorXd m = she_first_moment(g, ones, 0.4);
  CHECK((m - ones).cwiseAbs().maxCoeff() < 1e-11);

  SheGrid g2(-1.0, 0.5, 1.0, 0.05, 0.00125);
  const Eigen::VectorXd a = g2.project([](double X) { return std::sin(3.0 * X); });
  const Eigen::VectorXd b = g2.project([](double X) { return 1.0 + X * X; });
  const Eigen::VectorXd lin = she_first_moment(g2, a + 2.0 * b, 0.3);
  const Eigen::VectorXd sep =
      she_first_moment(g2, a, 0.3) + 2.0 * she_first_moment(g2, b, 0.3);
  CHECK((lin - sep).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("second moments: MC vs exact recursion vs Volterra oracle") {
  SheGrid g(-0.5, 0.0, 1.0, 0.1, 0.005);
  const Eigen::VectorXd Z0 = Eigen::VectorXd::Ones(g.sites());
  const double T = 0.3;

  const Eigen::MatrixXd M = she_exact_second_moment(g, Z0, T);
  const auto stats = run_she_ensemble(g, Z0, {T}, 6000, 4242, 2);
  for (int x = 0; x < g.sites(); x += 2) {
    const auto& s = stats.field_second[0][static_cast<std::size_t>(x)];
    CHECK(std::abs(s.mean() - M(x, x)) < 4.0 * s.se());
  }

  // Volterra oracle approaches the scheme's exact recursion as dt -> 0
  // (fixed dx): the gap at T contracts by < 0.7 per halving of dt.
  const auto v = she_volterra_second_moment(g, Z0, T, 240);
  const Eigen::VectorXd vT = v.back();
  double prev_gap = -1.0;
  for (double dt : {0.005, 0.0025, 0.00125}) {
    SheGrid gd(-0.5, 0.0, 1.0, 0.1, dt);
    const Eigen::MatrixXd Md = she_exact_second_moment(gd, Z0, T);
    double gap = 0.0;
    for (int x = 0; x < g.sites(); ++x) {
      gap = std::max(gap, std::abs(Md(x, x) - vT(x)) / vT(x));
    }
    if (prev_gap > 0.0) CHECK(gap < 0.7 * prev_gap);
    prev_gap = gap;
  }

  // Small-T self-scaling: v/(P_T Z0)^2 - 1 ~ T^{1/2}.
  double prev_ratio = 0.0;
  for (double Ts : {0.32, 0.08, 0.02}) {
    const auto vs = she_volterra_second_moment(g, Z0, Ts, 160);
    const Eigen::VectorXd m = she_first_moment(g, Z0, Ts);
    const int mid = g.sites() / 2;
    const double dev = vs.back()(mid) / (m(mid) * m(mid)) - 1.0;
    CHECK(dev > 0.0);
    if (prev_ratio > 0.0) {
      CHECK(dev / prev_ratio == Catch::Approx(0.5).margin(0.25));  // sqrt(T) halving
    }
    prev_ratio = dev;
  }
}

TEST_CASE("picard iterate norms decay factorially") {
  // g_{n+1}(T) = int_0^T dx sum_W Pd^2 g_n; sup_X g_n(T) <= C T^{n/2}/(n/2)!.
  SheGrid g(-0.5, 0.0, 1.0, 0.1, 0.005);
  const Eigen::VectorXd Z0 = Eigen::VectorXd::Ones(g.sites());
  const double T = 0.5;
  const int steps = 100;
  const double h = T / steps;
  std::vector<Eigen::MatrixXd> Q(static_cast<std::size_t>(steps) + 1);
  for (int k = 1; k <= steps; ++k) {
    Q[static_cast<std::size_t>(k)] = g.density_kernel(k * h).array().square().matrix();
  }
  std::vector<std::vector<Eigen::VectorXd>> iterates(5);
  iterates[0].resize(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    iterates[0][static_cast<std::size_t>(k)] =
        she_first_moment(g, Z0, k * h).array().square().matrix();
  }
  for (int n = 1; n <= 4; ++n) {
    iterates[static_cast<std::size_t>(n)].resize(steps + 1);
    auto& cur = iterates[static_cast<std::size_t>(n)];
    const auto& prev = iterates[static_cast<std::size_t>(n) - 1];
    cur[0] = Eigen::VectorXd::Zero(g.sites());
    for (int k = 1; k <= steps; ++k) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(g.sites());
      for (int l = 0; l < k; ++l) {
        acc += (h * g.dx()) *
               (Q[static_cast<std::size_t>(k - l)] * prev[static_cast<std::size_t>(l)]);
      }
      cur[static_cast<std::size_t>(k)] = acc;
    }
  }
  // f_n(T) <= C_0 C^n T^{n/2} / (n/2)!: the normalized ratios
  // r_n = f_n Gamma(n/2+1) / T^{n/2} must grow at most geometrically.
  auto sup_at_T = [&](int n) {
    return iterates[static_cast<std::size_t>(n)].back().maxCoeff();
  };
  std::vector<double> rn;
  for (int n = 0; n <= 4; ++n) {
    rn.push_back(sup_at_T(n) * std::tgamma(n / 2.0 + 1.0) / std::pow(T, n / 2.0));
  }
  const double growth = rn[2] / rn[1];
  for (int n = 3; n <= 4; ++n) {
    CHECK(rn[static_cast<std::size_t>(n)] <=
          2.0 * rn[static_cast<std::size_t>(n) - 1] * growth);
  }
}

TEST_CASE("test functions satisfy the boundary conditions exactly") {
  for (double A : {-1.0, 0.0, 0.7}) {
    const auto phi = RobinTestFunction::half_line(A);
    CHECK(phi(0.0) == 1.0);
    CHECK(std::abs(phi.bc_residual_left_fd()) < 1e-9);
    CHECK(phi(phi.support_top() + 0.01) == 0.0);
  }
  for (double A : {-1.0, 0.0}) {
    for (double B : {-0.5, 1.0}) {
      const auto phi = RobinTestFunction::interval(A, B);
      CHECK(std::abs(phi.bc_residual_left_fd()) < 1e-9);
      CHECK(std::abs(phi.bc_residual_right_fd()) < 1e-9);
    }
  }
  // Second derivative consistent with finite differences in the interior.
  const auto phi = RobinTestFunction::half_line(-0.5);
  for (double X : {0.25, 0.4, 0.6, 0.85}) {
    const double hstep = 1e-4;
    const double fd = (phi(X + hstep) + phi(X - hstep) - 2.0 * phi(X)) / (hstep * hstep);
    CHECK(phi.second_derivative(X) == Catch::Approx(fd).margin(2e-4));
  }
}

TEST_CASE("martingale statistics: zero-noise and zero-data degeneracies") {
  const auto phi = RobinTestFunction::half_line(-0.5, 0.15, 0.8);
  // Zero noise: Y sits at discretization-bias level, far below the O(1)
  // field scale, and the bias shrinks under grid refinement.
  auto bias = [&](double dx) {
    SheGrid g(-0.5, 0.0, 1.0, dx, dx * dx / 2.0);
    const auto st = run_she_martingale(g, Eigen::VectorXd::Ones(g.sites()), {0.25, 0.5},
                                       {phi}, 2, 5, 1, 0.0);
    double b = 0.0;
    for (const auto& s : st.Y_increments[0]) b = std::max(b, std::abs(s.mean()));
    return b;
  };
  const double b1 = bias(0.1), b2 = bias(0.05);
  CHECK(b1 < 1e-2);
  CHECK(b2 < 2.5e-3);
  CHECK(b2 < 0.5 * b1);
  SheGrid g(-0.5, 0.0, 1.0, 0.1, 0.005);
  // Zero data: Y and Q vanish identically.
  const auto statsz = run_she_martingale(g, Eigen::VectorXd::Zero(g.sites()), {0.25, 0.5},
                                         {phi}, 4, 5, 1, 1.0);
  for (const auto& s : statsz.Y_increments[0]) CHECK(s.mean() == 0.0);
  for (const auto& s : statsz.Q_increments[0]) CHECK(std::abs(s.mean()) < 1e-15);
}

TEST_CASE("martingale statistics: z-scores within bars at moderate size") {
  SheGrid g(0.0, 0.0, 1.0, 0.05, 0.00125);
  const auto phi = RobinTestFunction::interval(0.0, 0.0);
  const auto stats = run_she_martingale(g, Eigen::VectorXd::Ones(g.sites()),
                                        {0.125, 0.25, 0.375, 0.5}, {phi}, 3000, 31, 2);
  CHECK(stats.max_abs_z() < 5.0);
}

TEST_CASE("grid-refinement stability of one-point laws") {
  // KS distance between one-point samples at dx and dx/2 stays small.
  const double T = 0.5, Xp = 0.3;
  std::vector<double> samples[2];
  int idx = 0;
  for (double dx : {0.1, 0.05}) {
    SheGrid g(-0.5, 0.0, 1.0, dx, dx * dx / 2.0);
    const int probe = static_cast<int>(std::lround(Xp / dx));
    std::vector<std::vector<double>> store;
    run_she_ensemble(g, g.delta0(), {T}, 4000, 2025, 2, &store, probe);
    samples[idx++] = store[0];
  }
  CHECK(ks_distance(samples[0], samples[1]) < 0.05);
}
