#include <catch2/catch_amalgamated.hpp>

#include <kpzlab/continuum.hpp>

#include <cmath>

using namespace kpzlab;

namespace {
double gauss_heat(double T, double Z) {
  return std::exp(-Z * Z / (2.0 * T)) / std::sqrt(2.0 * M_PI * T);
}
}  // namespace

TEST_CASE("Neumann half-line limit is the reflected Gaussian") {
  auto ck = ContinuumKernel::half_line(0.0, 0.125, 4);
  for (double T : {0.25, 0.5, 1.0}) {
    for (double X : {0.0, 0.3, 1.1}) {
      for (double Y : {0.0, 0.4, 0.9}) {
        const auto v = ck(T, X, Y);
        const double ref = gauss_heat(T, X - Y) + gauss_heat(T, X + Y);
        CHECK(v.value == Catch::Approx(ref).margin(5e-3));
      }
    }
  }
}

TEST_CASE("refinement is Cauchy and symmetric") {
  auto ck = ContinuumKernel::half_line(-1.0, 0.125, 4);
  // Successive-level sup differences contract (ratio < 0.9 once asymptotic).
  double prev_sup = 0.0;
  for (int j = 1; j < ck.levels(); ++j) {
    double sup = 0.0;
    for (double T : {0.25, 1.0}) {
      for (double X : {0.0, 0.4, 1.2}) {
        for (double Y : {0.1, 0.8}) {
          sup = std::max(sup, std::abs(ck.level_value(j, T, X, Y) -
                                       ck.level_value(j - 1, T, X, Y)));
        }
      }
    }
    if (j >= 2) CHECK(sup < 0.9 * prev_sup);
    prev_sup = sup;
  }
  const auto v1 = ck(0.5, 0.3, 0.9);
  const auto v2 = ck(0.5, 0.9, 0.3);
  CHECK(v1.value == Catch::Approx(v2.value).margin(2.0 * (v1.error + v2.error) + 1e-9));
}

TEST_CASE("interval kernel is self-consistent at mixed parameters") {
  // (T=0.5, X=0.2, Y=0.7, A=-1, B=2, 4 levels): error estimate <= 1e-3, and
  // dropping the finest level moves the value by no more than a few times
  // the combined estimates.
  auto ck4 = ContinuumKernel::interval(-1.0, 2.0, 20, 4);
  auto ck3 = ContinuumKernel::interval(-1.0, 2.0, 20, 3);
  const auto v4 = ck4(0.5, 0.2, 0.7);
  const auto v3 = ck3(0.5, 0.2, 0.7);
  CHECK(v4.error <= 1e-3);
  CHECK(std::abs(v4.value - v3.value) <= 3.0 * (v4.error + v3.error));
}

TEST_CASE("refuses unresolvable small times") {
  auto ck = ContinuumKernel::half_line(0.0, 0.125, 3);
  CHECK_THROWS_AS(ck(1e-4, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ck(0.0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("Robin boundary residual shrinks under refinement") {
  for (double A : {-1.0, 0.7}) {
    auto ck = ContinuumKernel::half_line(A, 0.125, 4);
    double prev = 0.0;
    for (int j = 0; j < ck.levels(); ++j) {
      const double r = std::abs(ck.bc_residual_left(j, 0.5, 0.4));
      if (j > 0) CHECK(r < prev / (2.0 / 1.3));  // halves within +-30%
      if (j > 0) CHECK(r > prev / (2.0 * 1.3) * 0.5);
      prev = r;
    }
  }
  // Interval B side.
  auto ck = ContinuumKernel::interval(-1.0, 2.0, 8, 4);
  double prev = 0.0;
  for (int j = 0; j < ck.levels(); ++j) {
    const double r = std::abs(ck.bc_residual_right(j, 0.5, 0.6));
    if (j > 0) CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("mass bound |int P - 1| <= C sqrt(T)") {
  // A=B=0: conservation, deviation at quadrature-error level.
  {
    auto ck = ContinuumKernel::interval(0.0, 0.0, 16, 3);
    for (double T : {0.1, 0.5}) CHECK(std::abs(ck.mass_deviation(T, 0.3, 0.005)) < 2e-3);
  }
  // A=-1 half-line: deviation ratio ~2 per T quadrupling, and C finite.
  {
    auto ck = ContinuumKernel::half_line(-1.0, 1.0 / 32, 3);
    const double d1 = std::abs(ck.mass_deviation(0.04, 0.0, 0.01));
    const double d2 = std::abs(ck.mass_deviation(0.16, 0.0, 0.01));
    const double d3 = std::abs(ck.mass_deviation(0.64, 0.0, 0.01));
    CHECK(d2 / d1 == Catch::Approx(2.0).margin(0.8));
    CHECK(d3 / d2 == Catch::Approx(2.0).margin(0.8));
    for (double T : {0.04, 0.16, 0.64}) {
      CHECK(std::abs(ck.mass_deviation(T, 0.0, 0.01)) < 1.5 * std::sqrt(T));
    }
  }
}

TEST_CASE("delta initial data: int P_T(X,.) phi -> phi(X) at rate sqrt(T)") {
  auto ck = ContinuumKernel::half_line(-0.5, 1.0 / 32, 3);
  const double X = 0.5;
  // Lipschitz bump centered at X.
  auto phi = [&](double Y) { return std::max(0.0, 1.0 - 2.0 * std::abs(Y - X)); };
  double prev_dev = 1e9;
  for (double T : {0.16, 0.04, 0.01}) {
    const double dev = std::abs(ck.integrate(T, X, phi, 0.005) - phi(X));
    CHECK(dev < 2.0 * std::sqrt(T));
    CHECK(dev < prev_dev);
    prev_dev = dev;
  }
  // phi vanishing at X with phi >= 0: value tends to 0 from above-ish.
  auto phi0 = [&](double Y) { return std::min(1.0, std::abs(Y - X)); };
  const double v = ck.integrate(0.01, X, phi0, 0.005);
  CHECK(std::abs(v) < 0.2);
}

TEST_CASE("Gaussian-envelope and Lipschitz bounds on a window") {
  // P_T <= C T^{-1/2} e^{-|X-Y|/sqrt T} with a C that is stable across
  // refinement ladders.
  auto fit_C = [](const ContinuumKernel& ck) {
    double C = 0.0;
    for (double T : {0.05, 0.2, 0.8, 2.0}) {
      for (double X : {0.0, 0.5, 1.5}) {
        for (double Y : {0.0, 0.7, 2.0}) {
          const double v = ck(T, X, Y).value;
          const double envelope =
              std::pow(T, -0.5) * std::exp(-std::abs(X - Y) / std::sqrt(T));
          C = std::max(C, v / envelope);
        }
      }
    }
    return C;
  };
  auto ck = ContinuumKernel::half_line(-1.0, 1.0 / 32, 3);
  const double C = fit_C(ck);
  const double C_finer = fit_C(ContinuumKernel::half_line(-1.0, 1.0 / 32, 4));
  CHECK(C > 0.0);
  CHECK(C < 20.0);
  CHECK(std::abs(C_finer - C) < 0.3 * C);

  // Spatial Lipschitz with C T^{-1}; temporal with C S^{-3/2}.
  const double dX = 0.05;
  for (double T : {0.1, 0.4}) {
    const double lip =
        std::abs(ck(T, 0.6 + dX, 0.3).value - ck(T, 0.6, 0.3).value) / dX;
    CHECK(lip < 3.0 / T);
  }
  for (double S : {0.2, 0.4}) {
    const double dT = 0.05;
    const double rate = std::abs(ck(S + dT, 0.4, 0.3).value - ck(S, 0.4, 0.3).value) / dT;
    CHECK(rate < 3.0 * std::pow(S, -1.5));
  }
}

TEST_CASE("weighted mass int P e^{aY} dY <= C e^{aX} at a = 1") {
  auto ck = ContinuumKernel::half_line(-1.0, 0.125, 3);
  for (double T : {0.25, 1.0}) {
    for (double X : {0.0, 0.8}) {
      const double w = ck.integrate(T, X, [](double Y) { return std::exp(Y); }, 0.01);
      CHECK(w <= 10.0 * std::exp(X));
    }
  }
}

TEST_CASE("semigroup holds under quadrature") {
  auto ck = ContinuumKernel::interval(-1.0, 0.5, 8, 3);
  const double S = 0.2, T = 0.3, X = 0.3, Y = 0.6;
  const int n = 50;
  double conv = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double W = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    conv += w * ck(S, X, W).value * ck(T, W, Y).value;
  }
  conv /= n;
  const auto direct = ck(S + T, X, Y);
  CHECK(conv == Catch::Approx(direct.value).margin(0.02));
}
