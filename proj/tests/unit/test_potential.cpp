#include <doctest.h>

#include <cmath>
#include <numbers>

#include "boxanneal/errors.hpp"
#include "boxanneal/potential.hpp"

using namespace boxanneal;
using std::numbers::pi;

TEST_CASE("box potential rejects mu that is not a positive multiple of four") {
  CHECK_THROWS_AS(validate(BoxPotential{6, 0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(BoxPotential{0, 0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(BoxPotential{8, 0.0, 0.0}), DomainError);
  CHECK_NOTHROW(validate(BoxPotential{4, 0.2, 1.0}));
}

TEST_CASE("box potential values") {
  const BoxPotential p{12, 0.2, 2.0};
  CHECK(eval_box(p, 0.0) == doctest::Approx(0.0));
  CHECK(eval_box(p, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  const double x = 0.37;
  const double direct = 0.5 * (1 - std::cos(12 * pi * x / 2.0)) + 0.2 * (1 - std::cos(2 * pi * x / 2.0));
  CHECK(eval_box(p, x) == doctest::Approx(direct));
}

TEST_CASE("analytic slope and curvature match finite differences") {
  const BoxPotential p{16, -0.2, 1.0};
  const double h = 1e-5;
  for (double x : {0.05, 0.21, 0.5, 0.77}) {
    const double fd1 = (eval_box(p, x + h) - eval_box(p, x - h)) / (2 * h);
    const double fd2 = (eval_box(p, x + h) - 2 * eval_box(p, x) + eval_box(p, x - h)) / (h * h);
    CHECK(box_slope(p, x) == doctest::Approx(fd1).epsilon(1e-6));
    CHECK(box_curvature(p, x) == doctest::Approx(fd2).epsilon(1e-4));
  }
}

TEST_CASE("minima: mu/2 + 1 of them, walls one-sided") {
  for (int mu : {4, 8, 20}) {
    for (double a : {-0.2, 0.0, 0.2}) {
      const BoxPotential p{mu, a, 1.0};
      const auto mins = minima(p);
      REQUIRE(mins.size() == static_cast<std::size_t>(mu / 2 + 1));
      CHECK(mins.front().one_sided);
      CHECK(mins.back().one_sided);
      for (std::size_t i = 1; i + 1 < mins.size(); ++i) {
        CHECK_FALSE(mins[i].one_sided);
        // bisection stops at 1e-12 in x, so the slope is bounded by curvature * 1e-12
        CHECK(std::abs(box_slope(p, mins[i].x)) < 1e-11 * mins[i].curvature);
        CHECK(mins[i].curvature > 0.0);
      }
    }
  }
  // a = 0: interior minima sit exactly at 2kL/mu
  const auto flat = minima(BoxPotential{8, 0.0, 1.0});
  for (std::size_t k = 0; k < flat.size(); ++k) CHECK(flat[k].x == doctest::Approx(2.0 * k / 8).epsilon(1e-12));
}

TEST_CASE("concave envelope pulls the adjacent minimum toward the wall") {
  const BoxPotential p{12, 0.2, 1.0};
  CHECK(adjacent_minimum_x(p) == doctest::Approx(2.0 / 12));
  CHECK(minima(p)[1].x < 2.0 / 12);
}

TEST_CASE("rastrigin potential") {
  const RastriginPotential r{1.0, 0.2, 0.2};
  CHECK(eval_rastrigin(r, 0.0) == 0.0);
  CHECK(eval_rastrigin(r, 0.2) == doctest::Approx(0.02));
  CHECK(eval_rastrigin(r, 0.1) == doctest::Approx(0.005 + 0.2));
  CHECK_THROWS_AS(validate(RastriginPotential{1.0, 0.2, 0.0}), DomainError);
}
