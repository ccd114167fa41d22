#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "boxanneal/errors.hpp"
#include "boxanneal/oracles.hpp"
#include "boxanneal/spectrum.hpp"

using namespace boxanneal;

TEST_CASE("eigensolve agrees with a dense solver and certifies residuals") {
  const BoxPotential p{12, 0.2, 1.0};
  const BasisSpec b{120, 1.0, 1.0, 1.0};
  const HamiltonianMatrix h = build_hamiltonian(p, 300.0, b);
  const Eigenpairs e = eigensolve(h, 8);
  const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.dense()).eigenvalues();
  for (int i = 0; i < 8; ++i) {
    CHECK(e.energies(i) == doctest::Approx(ref(i)).epsilon(1e-12));
    const Eigen::VectorXd v = e.vectors.col(i);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK((h.apply(v) - e.energies(i) * v).norm() < 1e-10 * h.norm_inf());
  }
  CHECK_THROWS_AS(eigensolve(h, 0), DomainError);
  CHECK_THROWS_AS(eigensolve(h, 121), DomainError);
}

TEST_CASE("parity sectors partition the spectrum") {
  const BoxPotential p{8, 0.0, 1.0};
  const BasisSpec b{80, 1.0, 1.0, 1.0};
  const HamiltonianMatrix h = build_hamiltonian(p, 50.0, b);
  const Eigenpairs all = eigensolve(h, 6, false);
  const Eigenpairs even = eigensolve(h, Parity::even, 6, true);
  const Eigenpairs odd = eigensolve(h, Parity::odd, 6, false);
  std::vector<double> merged;
  for (int i = 0; i < 6; ++i) merged.insert(merged.end(), {even.energies(i), odd.energies(i)});
  std::sort(merged.begin(), merged.end());
  for (int i = 0; i < 6; ++i) CHECK(all.energies(i) == doctest::Approx(merged[i]).epsilon(1e-12));
  for (int n = 1; n < 80; n += 2) CHECK(even.vectors(n, 0) == 0.0);
}

TEST_CASE("zero-point energy of a flat landscape approaches the harmonic law") {
  const BasisSpec b{600, 1.0, 1.0, 1.0};
  const double s = 1e4;
  const Eigenpairs e = eigensolve(build_hamiltonian(BoxPotential{12, 0.0, 1.0}, s, b), 1, false);
  CHECK(e.energies(0) == doctest::Approx(zero_point_energy(12, s)).epsilon(0.05));
}

TEST_CASE("degenerate block vectors are localized in single wells") {
  // a = 0, mu = 8 at large s: three interior wells at x = 1/4, 1/2, 3/4 share E_0
  const BoxPotential p{8, 0.0, 1.0};
  const BasisSpec b{600, 1.0, 1.0, 1.0};
  const Eigenpairs e = eigensolve(build_hamiltonian(p, 1e4, b), 3);
  int localized = 0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXcd c = e.vectors.col(i).cast<std::complex<double>>();
    for (double centre : {0.25, 0.5, 0.75})
      if (window_probability(c, b, centre - 0.1, centre + 0.1) > 0.99) ++localized;
  }
  CHECK(localized == 3);
}

TEST_CASE("sweep, gaps and degeneracy count") {
  const BoxPotential p{8, 0.0, 1.0};
  const BasisSpec b{300, 1.0, 1.0, 1.0};
  const std::vector<double> grid = log_grid(0.0, 4.0, 5);
  CHECK(grid[2] == doctest::Approx(100.0));
  const SpectrumSweep sw = sweep(p, grid, 4, b, SweepOptions{false, 2});
  CHECK(sw.level_count() == 4);
  const auto d1 = gaps(sw, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(d1[i] == doctest::Approx(sw.levels(i, 1) - sw.levels(i, 0)));
  CHECK(degeneracy_count(sw, 4, 1e-6) == 3);
  CHECK(degeneracy_count(sw, 0, 1e-6) == 1);
}

TEST_CASE("pure kinetic gaps scale as 1/s and produce no plateau") {
  SpectrumSweep sw;
  sw.s_grid = log_grid(0.0, 4.0, 41);
  sw.levels.resize(41, 3);
  for (int i = 0; i < 41; ++i)
    for (int n = 0; n < 3; ++n) sw.levels(i, n) = (n + 1) * (n + 1) * 4.9348 / sw.s_grid[i];
  CHECK(detect_flat_gaps(sw, 1, 0.02).empty());
  CHECK_FALSE(detect_gap_closure(sw, 1, 1e-8).has_value());
}

TEST_CASE("synthetic closure and plateau are located") {
  SpectrumSweep sw;
  sw.s_grid = log_grid(0.0, 4.0, 81);
  sw.levels.resize(81, 2);
  for (int i = 0; i < 81; ++i) {
    const double x = std::log10(sw.s_grid[i]);
    sw.levels(i, 0) = 0.0;
    sw.levels(i, 1) = x < 2.0 ? (1.013 - x) * 0.5 : 0.4935;
  }
  const auto closure = detect_gap_closure(sw, 1, 1e-6);
  REQUIRE(closure.has_value());
  CHECK(std::log10(closure->s_lo) == doctest::Approx(1.013).epsilon(1e-4));
  const auto flats = detect_flat_gaps(sw, 1, 0.02);
  REQUIRE_FALSE(flats.empty());
  CHECK(flats.back().value == doctest::Approx(0.4935));
  CHECK(std::log10(flats.back().s_hi) == doctest::Approx(4.0));
}

TEST_CASE("wall and adjacent levels are identified deep in the concave regime") {
  const BoxPotential p{12, 0.2, 1.0};
  const BasisSpec b{800, 1.0, 1.0, 1.0};
  const Eigenpairs e = eigensolve(build_hamiltonian(p, 1e6, b), 20);
  const auto wall = identify_level(e, p, b, WellKind::wall);
  const auto adj = identify_level(e, p, b, WellKind::adjacent);
  REQUIRE(wall.has_value());
  REQUIRE(adj.has_value());
  CHECK(*wall == 0);
  CHECK(e.energies(*adj) == doctest::Approx(adjacent_energy(12, 0.2, 1e6)).epsilon(0.03));
}
