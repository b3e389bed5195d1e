#include <catch2/catch_amalgamated.hpp>

#include <kpzlab/goe.hpp>
#include <kpzlab/stats.hpp>

#include <cmath>

using namespace kpzlab;

TEST_CASE("sturm bisection agrees with a dense eigensolve") {
  Philox rng(5, 0);
  const int n = 60;
  std::vector<double> d(n), e(n - 1);
  for (auto& v : d) v = rng.normal();
  for (auto& v : e) v = std::abs(rng.normal()) + 0.1;
  Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(d.data(), n);
  Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(e.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const auto top = tridiag_top_eigenvalues(d, e, 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(top[static_cast<std::size_t>(i)] ==
          Catch::Approx(es.eigenvalues()(n - 1 - i)).margin(1e-9));
  }
}

TEST_CASE("edge points are strictly decreasing in every replica") {
  const auto s = sample_goe_edge(400, 16, 200, 11, 2);
  for (std::uint64_t r = 0; r < s.replicas; ++r) {
    for (int i = 0; i + 1 < s.k; ++i) CHECK(s.a(r, i) > s.a(r, i + 1));
  }
}

TEST_CASE("tridiagonal and dense samplers share the edge law") {
  const int n = 300, reps = 400;
  const auto st = sample_goe_edge(n, 1, reps, 21, 2);
  const auto sd = sample_goe_edge_dense(n, 1, reps, 22, 2);
  std::vector<double> a, b;
  for (int r = 0; r < reps; ++r) {
    a.push_back(st.a(static_cast<std::uint64_t>(r), 0));
    b.push_back(sd.a(static_cast<std::uint64_t>(r), 0));
  }
  CHECK(ks_distance(a, b) < 0.12);  // 2-sample KS 1% critical ~ 0.115 at 400/400
  // Location sanity: the top-point mean sits near -1.2 for both.
  CHECK(reduce_summaries(a).mean() == Catch::Approx(-1.2).margin(0.35));
  CHECK(reduce_summaries(b).mean() == Catch::Approx(-1.2).margin(0.35));
}

TEST_CASE("trace audit on the tridiagonal realization") {
  // Full spectrum of one tridiagonal draw sums to the matrix trace.
  Philox rng(77, 0);
  const int n = 500;
  std::vector<double> d(n), e(n - 1);
  double trace = 0.0;
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = std::sqrt(2.0) * rng.normal();
    trace += d[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < n - 1; ++i) e[static_cast<std::size_t>(i)] = rng.chi(n - 1 - i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(Eigen::Map<Eigen::VectorXd>(d.data(), n),
                            Eigen::Map<Eigen::VectorXd>(e.data(), n - 1),
                            Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().sum() ==
        Catch::Approx(trace).epsilon(1e-8).margin(1e-8 * std::abs(trace) + 1e-6));
}

TEST_CASE("laplace product basics") {
  const auto s = sample_goe_edge(400, 16, 300, 33, 2);
  // xi = 0: exactly one, zero variance and trivial truncation bracket.
  const auto p0 = laplace_product(s, 0.0, 1.0);
  CHECK(p0.estimate == 1.0);
  CHECK(p0.mc_error == 0.0);
  CHECK(p0.truncation_low == 1.0);
  // Monotone decrease in xi, pathwise hence also in the mean.
  double prev = 1.0;
  for (double xi : {0.25, 0.5, 1.0, 2.0, 8.0}) {
    const auto p = laplace_product(s, xi, 1.0);
    CHECK(p.estimate < prev);
    CHECK(p.estimate > 0.0);
    prev = p.estimate;
  }
  CHECK_THROWS_AS(laplace_product(s, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("truncation bracket covers a k-doubling") {
  const auto s32 = sample_goe_edge(1000, 32, 250, 44, 2);
  const auto s64 = sample_goe_edge(1000, 64, 250, 44, 2);
  for (double xi : {0.5, 2.0}) {
    const auto p32 = laplace_product(s32, xi, 1.0);
    const auto p64 = laplace_product(s64, xi, 1.0);
    // Same seeds => same matrices => the k=64 value sits inside the k=32
    // truncation bracket [estimate * low, estimate].
    CHECK(p64.estimate <= p32.estimate + 1e-12);
    CHECK(p64.estimate >= p32.estimate * p32.truncation_low - 1e-12);
    CHECK(p32.estimate - p64.estimate <= (1.0 - p32.truncation_low) * p32.estimate + 1e-12);
  }
}

TEST_CASE("empirical cdf endpoints and n-ladder stability") {
  const auto s = sample_goe_edge(500, 4, 400, 55, 2);
  CHECK(goe_cdf(s, 10.0).value == 1.0);
  CHECK(goe_cdf(s, -10.0).value == 0.0);
  const auto a = sample_goe_edge(500, 1, 800, 66, 2);
  const auto b = sample_goe_edge(1000, 1, 800, 67, 2);
  const auto ca = goe_cdf(a, 0.0), cb = goe_cdf(b, 0.0);
  CHECK(std::abs(ca.value - cb.value) < 2.0 * (ca.ci_halfwidth + cb.ci_halfwidth));
}

TEST_CASE("long-time table converges to the empirical cdf") {
  const auto s = sample_goe_edge(600, 24, 600, 88, 2);
  const double x = 0.0;
  const auto rows = longtime_limit_table(s, x, {8.0, 64.0, 512.0}, 1.0);
  CHECK(rows[1].gap_to_cdf < rows[0].gap_to_cdf);
  CHECK(rows[2].gap_to_cdf < rows[1].gap_to_cdf);
  CHECK(rows[2].gap_to_cdf < 2.0 * (rows[2].mc_error + goe_cdf(s, x).ci_halfwidth) + 0.01);
  // Per-replica limit: the product is an indicator at huge T (the factor
  // scale is exp[(T/2)^{1/3} (a_i - x)], so the gap has to clear 1/(T/2)^{1/3}).
  for (std::uint64_t r = 0; r < 50; ++r) {
    const double p = replica_product(s, r, 1.0, 1e9, x);
    if (s.a(r, 0) < x - 0.05) CHECK(p > 0.999);
    if (s.a(r, 0) > x + 0.05) CHECK(p < 0.001);
  }
  // xi-independence of the limit.
  const auto rows2 = longtime_limit_table(s, x, {512.0}, 3.0);
  CHECK(std::abs(rows2[0].value - rows[2].value) <
        3.0 * (rows2[0].mc_error + rows[2].mc_error) + 0.01);
}

TEST_CASE("she-side laplace functional basics") {
  std::vector<double> h{-0.5, 0.1, -1.2, 0.4};
  CHECK(she_laplace(h, 0.0, 1.0).estimate == 1.0);
  double prev = 1.0;
  for (double xi : {0.5, 1.0, 2.0}) {
    const double v = she_laplace(h, xi, 1.0).estimate;
    CHECK(v < prev);
    prev = v;
  }
  // Hand value: single sample h=0, T=0: estimate = exp(-xi).
  CHECK(she_laplace({0.0}, 1.0, 0.0).estimate == Catch::Approx(std::exp(-1.0)));
}
