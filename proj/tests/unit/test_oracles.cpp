#include <doctest.h>

#include <cmath>
#include <numbers>

#include "boxanneal/errors.hpp"
#include "boxanneal/oracles.hpp"

using namespace boxanneal;
using std::numbers::pi;

TEST_CASE("zero-point, wall and adjacent energies") {
  CHECK(zero_point_energy(12, 1e4) == doctest::Approx(12 * pi / (2 * std::sqrt(2e4))));
  CHECK(zero_point_energy(12, 1e4, 1.0, 1.0, 4.0) == doctest::Approx(zero_point_energy(12, 4e4)));
  CHECK(wall_energy(8, 0.0, 1e4) == doctest::Approx(3 * zero_point_energy(8, 1e4)));
  CHECK(wall_energy(8, 0.2, 1e7) == doctest::Approx(3 * zero_point_energy(8, 1e7) * std::sqrt(1.025)));
  CHECK_THROWS_AS(wall_energy(4, -2.0, 1e4), DomainError);
  CHECK(adjacent_energy(8, 0.2, 1e7) == doctest::Approx(zero_point_energy(8, 1e7) + 0.2));
}

TEST_CASE("first-order point: the wall's extra quanta match the adjacent excess potential") {
  for (int mu : {8, 12, 16}) {
    const double s = first_order_point(mu, 0.2);
    const double extra = 2 * zero_point_energy(mu, s) * std::sqrt(1 + 1.6 / (mu * mu));
    CHECK(extra == doctest::Approx(0.2 * (1 - std::cos(4 * pi / mu))).epsilon(1e-12));
  }
  CHECK(std::log10(first_order_point(12, 0.2)) == doctest::Approx(4.8564).epsilon(1e-4));
  CHECK_THROWS_AS(first_order_point(12, 0.0), DomainError);
}

TEST_CASE("flat-gap plateau values") {
  CHECK(flat_gap_value(1, 16, -0.2) == doctest::Approx(0.2 * (1 - std::cos(pi / 4))));
  CHECK(flat_gap_value(2, 16, -0.2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(flat_gap_value(4, 16, -0.2), DomainError);
  CHECK_THROWS_AS(flat_gap_value(0, 16, -0.2), DomainError);
}

TEST_CASE("adiabatic residual formula") {
  AdiabaticParams ap;
  ap.mu = 12;
  ap.s_f = 1e4;
  CHECK(adiabatic_prefactor(ap) == doctest::Approx(25 * std::sqrt(2.0) / (8 * pi)));
  CHECK(adiabatic_prefactor(ap) == doctest::Approx(1.40676).epsilon(1e-5));
  CHECK(final_well_frequency(ap) == doctest::Approx(12 * pi / std::sqrt(2e4)));
  for (double T : {100.0, 777.0, 5000.0}) {
    ap.T = T;
    CHECK(adiabatic_residual_envelope(ap) == doctest::Approx(1.40676 / (T * T)).epsilon(1e-5));
    CHECK(adiabatic_residual(ap) <= adiabatic_residual_envelope(ap));
    // the amplitude route and the closed form are the same expression
    CHECK(residual_from_c2(ap) == doctest::Approx(adiabatic_residual(ap)).epsilon(1e-12));
  }
}

TEST_CASE("Landau-Zener and solution width") {
  CHECK(landau_zener(0.0, 1.0) == 1.0);
  CHECK(landau_zener(0.1, 2.0) == doctest::Approx(std::exp(-2 * pi * 0.01 / 2.0)));
  CHECK_THROWS_AS(landau_zener(0.1, 0.0), DomainError);
  CHECK_THROWS_AS(landau_zener(-0.1, 1.0), DomainError);
  CHECK(solution_width(1.0, 1e4) == doctest::Approx(std::sqrt(1.0 / (2 * 100.0))));
}
