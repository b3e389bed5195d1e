#include <catch2/catch_amalgamated.hpp>

#include <kpzlab/kernel.hpp>
#include <kpzlab/rng.hpp>

#include <cmath>

using namespace kpzlab;

TEST_CASE("half-line: initial condition and A=0 reduction") {
  HalfLineKernel k(1.0);
  CHECK(k.value(0.0, 3, 3) == 1.0);
  CHECK(k.value(0.0, 3, 4) == 0.0);

  // At mu_A = 1 the series term vanishes: p^R = p(x-y) + p(x+y+1).
  WholeLineRow row(2.5, 40);
  for (int x : {0, 1, 5}) {
    for (int y : {0, 2, 7}) {
      CHECK(k.value(2.5, x, y) ==
            Catch::Approx(row(x - y) + row(x + y + 1)).margin(1e-13));
    }
  }
}

TEST_CASE("half-line: ghost relation, symmetry, conservation") {
  for (double mu : {0.9, 1.0, 1.02, 1.1}) {
    HalfLineKernel k(mu);
    for (double t : {0.7, 4.0, 31.0}) {
      // Ghost extension: p_t^R(-1, y) = mu_A p_t^R(0, y).
      for (int y : {0, 1, 4, 9}) {
        CHECK(k.value(t, -1, y) == Catch::Approx(mu * k.value(t, 0, y)).margin(1e-11));
      }
      // Symmetry in (x,y).
      CHECK(k.value(t, 2, 6) == Catch::Approx(k.value(t, 6, 2)).margin(1e-12));
      // Conservation at mu = 1 only.
      if (mu == 1.0) {
        for (int x : {0, 3}) CHECK(k.mass(t, x) == Catch::Approx(1.0).margin(1e-11));
      }
    }
  }
}

TEST_CASE("half-line: Chapman-Kolmogorov") {
  HalfLineKernel k(1.05);
  const double s = 1.3, t = 2.1;
  for (int x : {0, 2}) {
    for (int y : {1, 5}) {
      double conv = 0.0;
      for (int z = 0; z <= 140; ++z) conv += k.value(s, x, z) * k.value(t, z, y);
      CHECK(conv == Catch::Approx(k.value(s + t, x, y)).margin(1e-9));
    }
  }
}

TEST_CASE("half-line: image series matches the ODE oracle") {
  // Includes the example (t=2, x=0, y=0, mu_A=1.02).
  CHECK(HalfLineKernel(1.02).value(2.0, 0, 0) ==
        Catch::Approx(halfline_ode_oracle(2.0, 0, 0, 1.02)).margin(1e-8));

  Philox g(2024, 0);
  for (double mu : {0.8, 0.95, 1.0, 1.05, 1.2}) {
    HalfLineKernel k(mu);
    for (int rep = 0; rep < 6; ++rep) {
      const double t = 0.2 + 40.0 * g.u01();
      const int x = static_cast<int>(g.uniform_below(12));
      const int y = static_cast<int>(g.uniform_below(12));
      CHECK(k.value(t, x, y) ==
            Catch::Approx(halfline_ode_oracle(t, x, y, mu)).margin(1e-8));
    }
  }
}

TEST_CASE("interval tables: base cases and mu=1 degeneration") {
  // mu_A = mu_B = 1: all I_k = 1, all E_k = 0.
  IntervalImageKernel k1(8, 1.0, 1.0, 5);
  for (int k = -5; k <= 5; ++k) {
    CHECK(k1.I(k) == 1.0);
    CHECK(k1.sup_E(k) == 0.0);
  }

  // Generic parameters: I_0 = 1, E_0 = 0, first I values by hand.
  const double muA = 1.1, muB = 0.94;
  IntervalImageKernel k2(8, muA, muB, 5);
  CHECK(k2.I(0) == 1.0);
  CHECK(k2.sup_E(0) == 0.0);
  CHECK(k2.I(-1) == muA);
  CHECK(k2.I(1) == muB);
  CHECK(k2.I(-2) == muA * muB);
  CHECK(k2.I(2) == muB * muA);
  CHECK(k2.I(-3) == Catch::Approx(muA * muA * muB).epsilon(1e-15));
  CHECK(k2.I(3) == Catch::Approx(muB * muB * muA).epsilon(1e-15));
}

TEST_CASE("interval: growth of the correction tables is geometric") {
  IntervalImageKernel k(16, 1.0 + 1.0 / 16, 1.0 - 2.0 / 16, 6);
  const double C0 = k.fitted_C0();
  for (int j = 1; j <= 6; ++j) {
    CHECK(k.sup_E(j) <= std::pow(C0, j));
    CHECK(k.sup_E(-j) <= std::pow(C0, j));
  }
}

TEST_CASE("interval: initial condition and ghost relations") {
  const int N = 12;
  const double muA = 1.0 + 1.5 / N, muB = 1.0 - 0.5 / N;
  IntervalImageKernel k(N, muA, muB, 8);
  for (int x = 0; x <= N; ++x) {
    for (int y = 0; y <= N; ++y) {
      CHECK(k.value(0.0, x, y, 1e-9) == Catch::Approx(x == y ? 1.0 : 0.0).margin(1e-11));
    }
  }
  for (double t : {0.9, 7.0}) {
    for (int y : {0, 3, N}) {
      CHECK(k.value(t, -1, y, 1e-9) ==
            Catch::Approx(muA * k.value(t, 0, y, 1e-9)).margin(1e-9));
      CHECK(k.value(t, N + 1, y, 1e-9) ==
            Catch::Approx(muB * k.value(t, N, y, 1e-9)).margin(1e-9));
    }
  }
}

TEST_CASE("interval: recursion route matches the spectral route") {
  // Example shape: N=16, A=-1, B=2, kernel from tables vs spectral to 1e-8.
  const int N = 16;
  const double muA = 1.0 + 1.0 / N, muB = 1.0 - 2.0 / N;
  const int K = suggest_interval_K(N, 1.0 * N * N, 1e-10, -1.0, 2.0);
  IntervalImageKernel k(N, muA, muB, K);
  auto sp = shared_spectrum(N, muA, muB);
  Philox g(5, 0);
  for (int rep = 0; rep < 24; ++rep) {
    const double t = 256.0 * g.u01();  // up to N^2
    const int x = static_cast<int>(g.uniform_below(N + 1));
    const int y = static_cast<int>(g.uniform_below(N + 1));
    CHECK(k.value(t, x, y, 1e-9) == Catch::Approx(sp->value(t, x, y)).margin(1e-8));
  }

  // Example: N=16, t=30, x=3, y=9, A=-1, B=0.5.
  const double muB2 = 1.0 - 0.5 / N;
  IntervalImageKernel k2(N, muA, muB2, suggest_interval_K(N, 30.0, 1e-10, -1.0, 0.5));
  auto sp2 = shared_spectrum(N, muA, muB2);
  CHECK(k2.value(30.0, 3, 9, 1e-9) == Catch::Approx(sp2->value(30.0, 3, 9)).margin(1e-8));
}

TEST_CASE("interval: long-time limit at A=B=0 is the uniform measure") {
  const int N = 16;
  auto sp = shared_spectrum(N, 1.0, 1.0);
  const double t = 10.0 * N * N;
  for (int x : {0, 5, 16}) {
    for (int y : {2, 9}) {
      CHECK(sp->value(t, x, y) == Catch::Approx(1.0 / (N + 1)).margin(1e-9));
    }
  }
}

TEST_CASE("interval: rejects a truncation K too small for the horizon") {
  IntervalImageKernel k(8, 1.1, 1.1, 2);
  CHECK_THROWS_AS(k.value(400.0, 3, 3, 1e-10), std::runtime_error);
}

TEST_CASE("spectral route: completeness and symmetry") {
  auto sp = shared_spectrum(20, 1.07, 0.93);
  for (int x = 0; x <= 20; ++x) {
    for (int y = 0; y <= 20; ++y) {
      const double expect = (x == y) ? 1.0 : 0.0;
      CHECK(sp->value(0.0, x, y) == Catch::Approx(expect).margin(1e-10));
    }
  }
  CHECK(sp->value(3.0, 4, 11) == Catch::Approx(sp->value(3.0, 11, 4)).margin(1e-13));
}
