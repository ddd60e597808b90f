#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lprobust/penalty.hpp"
#include "oracles.hpp"

using namespace lprobust;

namespace {

Experiment five_pairs() {
  std::vector<ObservationPair> p;
  for (double o : {2.0, 2.0, 7.0, 9.0, 11.0}) p.push_back({Point{0.0}, Point{o}});
  return Experiment(1, 1, std::move(p));
}

}  // namespace

TEST_CASE("penalty values") {
  CHECK(penalty(PenaltyFamily::lp(0.5), 4.0) == doctest::Approx(2.0));
  CHECK(penalty(PenaltyFamily::lp(0.3), 0.0) == 0.0);
  CHECK(penalty(PenaltyFamily::l0(1e-9), 0.0) == 0.0);
  CHECK(penalty(PenaltyFamily::l0(1e-9), 1e-10) == 0.0);
  CHECK(penalty(PenaltyFamily::l0(1e-9), 1e-3) == 1.0);

  const auto sr = PenaltyFamily::sr_piecewise(0.5, 2.0, 1.0);
  // Both branches at the knee x = k p = 0.5.
  CHECK(penalty(sr, 0.5) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(std::exp(sr_log_constant({0.5, 2.0, 1.0})) * 0.25 ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  // C(p) = 0.5^-1.5, times 0.25^2.
  CHECK(penalty(sr, 0.25) == doctest::Approx(std::pow(0.5, -1.5) * 0.0625).epsilon(1e-12));
  CHECK(penalty(sr, 0.25) == doctest::Approx(0.17677670).epsilon(1e-7));
}

TEST_CASE("penalty rejects negative residuals and bad families") {
  CHECK_THROWS_AS(penalty(PenaltyFamily::lp(0.5), -1.0), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::lp(0.0), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::lp(1.5), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::sr_piecewise(1.0, 2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::sr_piecewise(0.5, 0.5, 1.0), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::sr_piecewise(0.5, 2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::l0(0.0), InvalidArgument);
}

TEST_CASE("family spec grammar") {
  CHECK(std::get<LpPenalty>(PenaltyFamily::parse("lp:0.1").variant()).p == 0.1);
  CHECK(std::get<L0Penalty>(PenaltyFamily::parse("l0:1e-9").variant()).tol == 1e-9);
  const auto sr = std::get<SrPiecewisePenalty>(PenaltyFamily::parse("sr:0.3,2,1.5").variant());
  CHECK(sr.p == 0.3);
  CHECK(sr.q == 2.0);
  CHECK(sr.k == 1.5);
  CHECK(PenaltyFamily::parse("sr:0.3,2,1.5").to_string() == "sr:0.3,2,1.5");
  CHECK_THROWS_AS(PenaltyFamily::parse("lp"), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::parse("lp:abc"), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::parse("huber:1"), InvalidArgument);
  CHECK_THROWS_AS(PenaltyFamily::parse("sr:0.3,2"), InvalidArgument);
}

TEST_CASE("penalty is nondecreasing with penalty(0) = 0") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::uniform_real_distribution<double> pu(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = pu(rng);
    for (const auto& f : {PenaltyFamily::lp(p), PenaltyFamily::l0(0.1),
                          PenaltyFamily::sr_piecewise(p, 1.0 + 3.0 * pu(rng), 0.1 + 2.0 * pu(rng))}) {
      CHECK(penalty(f, 0.0) == 0.0);
      std::vector<double> xs(50);
      for (auto& x : xs) x = u(rng);
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(penalty(f, xs[i]) >= penalty(f, xs[i - 1]) * (1.0 - 1e-14));
      }
    }
  }
}

TEST_CASE("Lp is subadditive") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_real_distribution<double> pu(0.01, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng);
    const auto f = PenaltyFamily::lp(pu(rng));
    CHECK(penalty(f, a + b) <= (penalty(f, a) + penalty(f, b)) * (1.0 + 1e-14));
  }
}

TEST_CASE("piecewise family is continuous at the knee") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pu(0.01, 0.99);
  std::uniform_real_distribution<double> qu(1.0, 6.0);
  std::uniform_real_distribution<double> ku(0.01, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const SrPiecewisePenalty f{pu(rng), qu(rng), ku(rng)};
    const double knee = f.k * f.p;
    const double upper = std::pow(knee, f.p);
    const double lower = std::exp(sr_log_constant(f) + f.q * std::log(knee));
    CHECK(std::abs(upper - lower) <= 1e-12 * upper);
  }
}

TEST_CASE("Lp approaches the L0 indicator as p decreases") {
  double prev_gap = INFINITY;
  for (double p : {0.5, 0.1, 0.01}) {
    const auto f = PenaltyFamily::lp(p);
    // Fixed x > 0 tends to 1.
    const double gap = std::abs(penalty(f, 0.3) - 1.0) + std::abs(penalty(f, 7.0) - 1.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    // The x with x^p = A shrinks towards 0 for A in (0,1).
    const double A = 0.5;
    const double x = std::pow(A, 1.0 / p);
    CHECK(penalty(f, x) == doctest::Approx(A));
    if (p == 0.01) {
      CHECK(x < 1e-29);
    }
  }
  CHECK(prev_gap < 0.05);
}

TEST_CASE("objective value on the five-pair fixture") {
  const auto exp = five_pairs();
  const auto t = Transform::translation({2.0});
  // Independent summation over raw offsets.
  const double expected = oracle::lp_sum_1d({2, 2, 7, 9, 11}, 2.0, 0.1);
  CHECK(expected == doctest::Approx(3.6351639267).epsilon(1e-10));
  CHECK(objective_value(exp, t, PenaltyFamily::lp(0.1)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(objective_value(exp, t, PenaltyFamily::l0(1e-9)) == 3.0);
}

TEST_CASE("objective is zero for all-perfect experiments") {
  std::vector<ObservationPair> p;
  const auto t = Transform::rotation(0.4);
  for (int i = 1; i <= 6; ++i) {
    const Point in{std::cos(i * 1.0), std::sin(i * 2.0)};
    p.push_back({in, apply(t, in)});
  }
  const Experiment exp(2, 2, std::move(p));
  for (const auto& f : {PenaltyFamily::lp(0.05), PenaltyFamily::l0(), PenaltyFamily::sr_piecewise(0.2)}) {
    CHECK(objective_value(exp, t, f) == 0.0);
  }
}

TEST_CASE("objective is invariant under permutation of pairs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-4, 4);
  std::vector<ObservationPair> p;
  for (int i = 0; i < 30; ++i) p.push_back({Point{u(rng), u(rng)}, Point{u(rng), u(rng)}});
  const auto t = Transform::translation({0.3, -0.2});
  const auto f = PenaltyFamily::lp(0.4);
  const double base = objective_value(Experiment(2, 2, p), t, f);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(objective_value(Experiment(2, 2, p), t, f) == doctest::Approx(base).epsilon(1e-13));
  }
}
