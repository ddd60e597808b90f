#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lprobust/bounds.hpp"
#include "lprobust/transform.hpp"

using namespace lprobust;
using namespace lprobust::bounds;

TEST_CASE("minimum confidence exponent reproduces the a table") {
  const double expected[] = {0.696, 0.676, 0.666, 0.660, 0.655, 0.652, 0.649, 0.647, 0.645, 0.643};
  for (int i = 0; i < 10; ++i) {
    const std::size_t M = 100 * (i + 1);
    CHECK(min_confidence_exponent(M, 0.999) == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("exact exponent is minimal at 1e-3 resolution") {
  for (std::size_t M = 2; M <= 5000; M = M * 3 / 2 + 1) {
    for (double target : {0.5, 0.9, 0.999}) {
      double a = 0.0;
      try {
        a = confidence_exponent_exact(M, target);
      } catch (const Infeasible&) {
        continue;
      }
      CHECK(concentration_probability(static_cast<double>(M), a) >= target);
      if (a - 0.001 > 0.5) {
        CHECK(concentration_probability(static_cast<double>(M), a - 0.001) < target);
      }
      CHECK(std::abs(min_confidence_exponent(M, target) - a) <= 0.0005 + 1e-12);
    }
  }
}

TEST_CASE("exponent is nonincreasing in M") {
  double prev = 1.0;
  for (std::size_t M = 50; M <= 5000; M += 50) {
    const double a = confidence_exponent_exact(M, 0.999);
    CHECK(a <= prev + 1e-12);
    prev = a;
  }
}

TEST_CASE("exponent preconditions") {
  CHECK_THROWS_AS(min_confidence_exponent(1, 0.9), InvalidArgument);
  CHECK_THROWS_AS(min_confidence_exponent(100, 1.0), InvalidArgument);
  CHECK_THROWS_AS(min_confidence_exponent(2, 0.999999), Infeasible);
}

TEST_CASE("TFG uniform bound") {
  // Oracle: 2 exp(a ln M).
  CHECK(tfg_bound_uniform(1000, 0.643) == doctest::Approx(2 * std::exp(0.643 * std::log(1000.0))));
  CHECK(tfg_bound_uniform(1000, 0.643) == doctest::Approx(169.86).epsilon(0.05 / 169.86));
  CHECK(tfg_bound_uniform(100, 0.696) == doctest::Approx(49.3208).epsilon(1e-5));
  CHECK(tfg_bound_uniform(1, 0.77) == 2.0);
}

TEST_CASE("TSG uniform bound and its maximum") {
  SUBCASE("plug-in at the maximizer equals the closed-form maximum") {
    const double dmax = tsg_maximizer_uniform(1000, 0.643, 0.5);
    const double top = tsg_max_uniform(1000, 0.643, 0.5);
    CHECK(tsg_bound_uniform({1000, 0.643, 0.5, dmax}) == doctest::Approx(top).epsilon(1e-12));
    // (1-p^2)^(1/p) M = 562.5 is close to, not at, the maximizer.
    const double at_5625 = tsg_bound_uniform({1000, 0.643, 0.5, 562.5});
    CHECK(at_5625 < top);
    CHECK(at_5625 >= top * (1 - 2.5e-3));
    CHECK(tsg_bound_uniform({1000, 0.643, 0.5, 2 * dmax}) < top);
  }
  SUBCASE("hand evaluation at M = 1") {
    CHECK(tsg_bound_uniform({1, 0.9999999, 0.5, 1.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("reported maxima") {
    CHECK(tsg_max_uniform(1000, 0.643, 0.5) == doctest::Approx(428.45).epsilon(0.5 / 428.45));
    CHECK(tsg_max_uniform(1000, 0.643, 0.05) == doctest::Approx(128.59).epsilon(0.5 / 128.6));
  }
  SUBCASE("p -> 1 tends to M + 1") {
    // p (1-p^2)^((1-p)/p) -> 1, so the first term tends to M + 1 - M^a.
    CHECK(tsg_max_uniform(1000, 0.643, 1 - 1e-9) == doctest::Approx(1001.0).epsilon(1e-6));
    CHECK(tsg_max_uniform(1000, 0.643, 0.99) > tsg_max_uniform(1000, 0.643, 0.9));
  }
  SUBCASE("no grid point exceeds the maximum") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> Mu(2, 3000), au(0.51, 0.99), pu(0.02, 0.98);
    for (int t = 0; t < 20; ++t) {
      const double M = std::floor(Mu(rng)), a = au(rng), p = pu(rng);
      const double top = tsg_max_uniform(M, a, p);
      for (int i = 1; i <= 10000; ++i) {
        const double d = 2.0 * M * i / 10000.0;
        CHECK(tsg_bound_uniform({M, a, p, d}) <= top + 1e-6);
      }
    }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(tsg_bound_uniform({1000, 0.643, 0.5, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(tsg_max_uniform(1000, 0.4, 0.5), InvalidArgument);
    CHECK_THROWS_AS(tsg_max_uniform(1000, 0.6, 1.0), InvalidArgument);
  }
}

TEST_CASE("breakdown ratio") {
  CHECK(breakdown_ratio(0.50, 1000, 0.643) == doctest::Approx(0.60).epsilon(0.005 / 0.60));
  CHECK(breakdown_ratio(0.30, 1000, 0.643) == doctest::Approx(0.48).epsilon(0.005 / 0.48));
  CHECK(breakdown_ratio(0.05, 1000, 0.643) == doctest::Approx(0.30).epsilon(0.005 / 0.30));
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double r = breakdown_ratio(0.005 * i, 1000, 0.643);
    CHECK(r > prev);
    prev = r;
  }
}

namespace {
const Cdf kUniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
const Cdf kSquare = [](double x) { return std::pow(std::clamp(x, 0.0, 1.0), 2.0); };
}  // namespace

TEST_CASE("general TFG bound") {
  CHECK(tfg_bound_general(kUniform, 1.0, 0.5, 1000) == doctest::Approx(250.0).epsilon(1e-12));
  CHECK(tfg_bound_general(kSquare, 1.0, 0.5, 1000) == doctest::Approx(614.2766953).epsilon(1e-9));
  CHECK(std::abs(tfg_bound_general(kUniform, 1e-12, 0.5, 1000)) < 1e-6);
  CHECK_THROWS_AS(tfg_bound_general(kUniform, 0.0, 0.5, 1000), InvalidArgument);
}

TEST_CASE("general TSG bound") {
  CHECK(tsg_bound_general(kUniform, 0.6, 0.5, 1000) == doctest::Approx(400.0).epsilon(1e-12));
  CHECK(tsg_bound_general(kUniform, 0.3, 0.5, 1000) == doctest::Approx(434.7009496).epsilon(1e-9));
  // Third branch: 100 (sqrt(10) - 1) + 100.
  const double small = tsg_bound_general(kUniform, 0.1, 0.5, 1000);
  CHECK(small == doctest::Approx(316.2277660).epsilon(1e-9));

  // Monte Carlo: mean of sum over d_i > d_T of [d_i^p - (d_i - d_T)^p] / d_T^p.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dT = 0.1, p = 0.5;
  const int samples = 100000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double d = u(rng);
    if (d > dT) sum += (std::pow(d, p) - std::pow(d - dT, p)) / std::pow(dT, p);
  }
  const double empirical = 1000.0 * sum / samples;
  CHECK(empirical < small);
  CHECK(empirical == doctest::Approx(241.6).epsilon(0.02));
}

TEST_CASE("uniform noise: empirical normalized sum stays under the TFG + TSG bound") {
  const double M = 1000, a = 0.643;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(M));
  const double ps[] = {0.1, 0.3, 0.5, 0.9};
  int ok = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const double p = ps[t % 4];
    for (auto& x : d) x = M * u(rng);
    const double dT = M * (1.0 - u(rng));
    const double norm = std::pow(dT, p);
    double sum = 0.0;
    for (double x : d) sum += (std::pow(x, p) - std::pow(std::abs(x - dT), p)) / norm;
    if (sum <= tfg_bound_uniform(M, a) + tsg_max_uniform(M, a, p)) ++ok;
  }
  CHECK(ok >= 0.99 * trials);
}
