#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lprobust/transform.hpp"

using namespace lprobust;

namespace {

ObservationPair pr(Point in, Point out) { return {std::move(in), std::move(out)}; }

}  // namespace

TEST_CASE("apply follows each group's definition") {
  CHECK(apply(Transform::translation({1, 2}), Point{0, 0}) == Point{1, 2});
  CHECK(apply(Transform::uniform_scaling(2, 2.0), Point{3, -1}) == Point{6, -2});
  CHECK(apply(Transform::nonuniform_scaling({2, 3}), Point{1, 1}) == Point{2, 3});

  const auto y = apply(Transform::rotation(std::numbers::pi / 2), Point{1, 0});
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(1.0));
}

TEST_CASE("apply rejects dimension mismatch") {
  CHECK_THROWS_AS(apply(Transform::translation({1, 2}), Point{0}), InvalidArgument);
  CHECK_THROWS_AS(Transform(Group::Rotation2D, 3, {0.1}), InvalidArgument);
  CHECK_THROWS_AS(Transform::uniform_scaling(1, -1.0), InvalidArgument);
  CHECK_THROWS_AS(Transform::nonuniform_scaling({1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(Transform(Group::Translation, 2, {1.0}), InvalidArgument);
}

TEST_CASE("residual") {
  CHECK(residual(pr({0}, {2}), Transform::translation({2})) == 0.0);
  CHECK(residual(pr({0}, {7}), Transform::translation({2})) == 5.0);
  CHECK(residual(pr({1, 0}, {0, 1}), Transform::rotation(0.0)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(residual(pr({1, 0}, {0, 1}), Transform::translation({1})), InvalidArgument);
}

TEST_CASE("identity transforms fix every point") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (Group g : {Group::Translation, Group::UniformScaling, Group::NonUniformScaling}) {
    for (std::size_t d = 1; d <= 3; ++d) {
      Point x{std::vector<double>(d)};
      for (auto& c : x.coords) c = u(rng);
      CHECK(apply(Transform::identity(g, d), x) == x);
    }
  }
  const Point x{u(rng), u(rng)};
  CHECK(apply(Transform::identity(Group::Rotation2D, 2), x) == x);
}

TEST_CASE("rotation preserves norms") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  std::uniform_real_distribution<double> ang(-20, 20);
  for (int i = 0; i < 1000; ++i) {
    const Point x{u(rng), u(rng)};
    const auto y = apply(Transform::rotation(ang(rng)), x);
    const double nx = norm(x.coords);
    CHECK(std::abs(norm(y.coords) - nx) <= 1e-12 * nx);
  }
}

TEST_CASE("translation residual depends only on O - I - a") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) {
    const Point in{u(rng), u(rng)};
    const Point out{u(rng), u(rng)};
    const Point shift{u(rng), u(rng)};
    const auto t = Transform::translation({u(rng), u(rng)});
    const Point in2{in[0] + shift[0], in[1] + shift[1]};
    const Point out2{out[0] + shift[0], out[1] + shift[1]};
    CHECK(residual(pr(in2, out2), t) == doctest::Approx(residual(pr(in, out), t)).epsilon(1e-12));
  }
}

TEST_CASE("residual is zero exactly when the pair is consistent") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const auto t = Transform::rotation(u(rng));
    const Point in{u(rng), u(rng)};
    const auto exact = pr(in, apply(t, in));
    CHECK(is_consistent(exact, t));
    CHECK(residual(exact, t) == 0.0);
    const auto off = pr(in, Point{exact.output[0] + 1e-6, exact.output[1]});
    CHECK_FALSE(is_consistent(off, t));
  }
}

TEST_CASE("rotation angles are wrapped into [0, 2pi)") {
  CHECK(Transform::rotation(-std::numbers::pi / 2).params()[0] ==
        doctest::Approx(1.5 * std::numbers::pi));
  CHECK(Transform::rotation(2 * std::numbers::pi).params()[0] == doctest::Approx(0.0));
  CHECK(param_distance(Transform::rotation(0.01), Transform::rotation(-0.01)) ==
        doctest::Approx(0.02));
}

TEST_CASE("sanitize") {
  SUBCASE("rotation drops all-zero inputs") {
    const Experiment e(2, 2, {pr({0, 0}, {1, 1}), pr({1, 0}, {0, 1})});
    const auto s = sanitize(e, Group::Rotation2D);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == e[1]);
  }
  SUBCASE("translation passes through") {
    const Experiment e(2, 2, {pr({0, 0}, {1, 1}), pr({1, 0}, {0, 1})});
    CHECK(sanitize(e, Group::Translation) == e);
  }
  SUBCASE("non-uniform scaling drops any zero component, keeps order") {
    const Experiment e(2, 2, {pr({1, 1}, {1, 1}), pr({2, 0}, {4, 0}), pr({3, 3}, {1, 2})});
    const auto s = sanitize(e, Group::NonUniformScaling);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == e[0]);
    CHECK(s[1] == e[2]);
  }
  SUBCASE("uniform scaling keeps inputs with a zero component") {
    const Experiment e(2, 2, {pr({2, 0}, {4, 0})});
    CHECK(sanitize(e, Group::UniformScaling).size() == 1);
  }
  SUBCASE("empty result is degenerate") {
    const Experiment e(2, 2, {pr({0, 0}, {1, 1})});
    CHECK_THROWS_AS(sanitize(e, Group::UniformScaling), DegenerateExperiment);
  }
}

TEST_CASE("experiment validates its pairs") {
  CHECK_THROWS_AS(Experiment(1, 1, {}), DegenerateExperiment);
  CHECK_THROWS_AS(Experiment(2, 2, {pr({1}, {1, 2})}), InvalidArgument);
  CHECK_THROWS_AS(Experiment(1, 1, {pr({NAN}, {1})}), InvalidArgument);
}
