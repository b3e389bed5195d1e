#include <catch2/catch_amalgamated.hpp>

#include <kpzlab/wholeline.hpp>

#include <cmath>

using namespace kpzlab;

TEST_CASE("initial condition is a point mass") {
  WholeLineRow row(0.0, 10);
  CHECK(row(0) == 1.0);
  for (int m = 1; m <= 10; ++m) CHECK(row(m) == 0.0);
  CHECK(wholeline_point(0.0, 3) == 0.0);
  CHECK(wholeline_point(0.0, 0) == 1.0);
}

TEST_CASE("uniformization matches modified-Bessel values") {
  // p_t(x) = e^{-t} I_x(t); reference values from a 30-digit evaluation.
  CHECK(wholeline_point(1.0, 0) == Catch::Approx(0.46575960759364043650).epsilon(1e-12));
  CHECK(wholeline_point(3.0, 2) == Catch::Approx(0.11178254529695816272).epsilon(1e-12));
  CHECK(wholeline_point(5.0, -1) == Catch::Approx(0.16397226694454235693).epsilon(1e-12));

  // And against the standard library's Bessel function on a grid.
  for (double t : {0.3, 2.0, 9.5, 24.0}) {
    WholeLineRow row(t, 40);
    for (int x : {0, 1, 2, 5, 11}) {
      const double ref = std::exp(-t) * std::cyl_bessel_i(x, t);
      CHECK(row(x) == Catch::Approx(ref).margin(1e-12));
    }
  }
}

TEST_CASE("probability conservation and positivity") {
  for (double t : {0.5, 5.0, 57.0, 411.0}) {
    const int L = static_cast<int>(t + 12 * std::sqrt(t) + 80);
    WholeLineRow row(t, L, 1e-13);
    double sum = row(0);
    for (int m = 1; m <= L; ++m) {
      CHECK(row(m) >= 0.0);
      sum += 2.0 * row(m);
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    CHECK(row.tail_beyond() < 1e-12);
  }
}

TEST_CASE("row values are symmetric and monotone in |x|") {
  WholeLineRow row(7.0, 60);
  CHECK(row(-13) == row(13));
  for (int m = 0; m < 40; ++m) CHECK(row(m) >= row(m + 1));
}

TEST_CASE("large-t rows survive e^{-t} underflow") {
  const double t = 4000.0;
  WholeLineRow row(t, 200, 1e-11);
  // Gaussian profile check: p_t(0) ~ (2 pi t)^{-1/2}.
  const double gauss = 1.0 / std::sqrt(2.0 * M_PI * t);
  CHECK(row(0) == Catch::Approx(gauss).epsilon(0.01));
  CHECK(row(100) < row(0));
  CHECK(row(100) > 0.0);
}

TEST_CASE("tail bounds dominate the true values") {
  for (double t : {1.0, 10.0, 100.0}) {
    WholeLineRow row(t, static_cast<int>(3 * t + 60));
    for (int m = 0; m <= row.length(); m += 7) {
      CHECK(row(m) <= wholeline_point_bound(t, m) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("generating identity: lhs equals rhs") {
  // mu = 1 is exact conservation; t = 0 collapses to mu^{-x}.
  for (double t : {0.0, 1.0, 17.0, 50.0}) {
    for (std::int64_t x : {0, 1, 5}) {
      for (double mu : {0.9, 1.0, 1.05}) {
        const auto g = generating_identity(t, x, mu, 1e-12);
        CHECK(std::abs(g.lhs - g.rhs) < 1e-10);
      }
    }
  }
  const auto g = generating_identity(3.0, 2, 1.05, 1e-12);
  CHECK(g.rhs == Catch::Approx(0.91027466097193226972).epsilon(1e-12));
  CHECK(g.lhs == Catch::Approx(0.91027466097193226972).epsilon(1e-9));
}

TEST_CASE("generating identity rejects bad mu") {
  CHECK_THROWS_AS(generating_identity(1.0, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(generating_identity(1.0, 0, -2.0), std::invalid_argument);
}
