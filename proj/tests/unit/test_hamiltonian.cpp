#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "boxanneal/errors.hpp"
#include "boxanneal/hamiltonian.hpp"

using namespace boxanneal;
using std::numbers::pi;

namespace {

// Composite Simpson on [0, L]; enough panels to resolve products of modes below 40.
template <typename F>
double simpson(F f, double L, int panels = 4000) {
  const double h = L / panels;
  double sum = f(0.0) + f(L);
  for (int i = 1; i < panels; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("kinetic eigenvalues and basis normalization") {
  const BasisSpec b{50, 2.0, 3.0, 0.5};
  CHECK(kinetic_eigenvalue(0, b) == doctest::Approx(pi * pi * 0.25 / (2 * 3.0 * 4.0)));
  CHECK(kinetic_eigenvalue(4, b) == doctest::Approx(25 * kinetic_eigenvalue(0, b)));
  const double norm = simpson([&](double x) { return std::pow(basis_function(3, x, b), 2); }, b.L);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(basis_function(0, 2.5, b), DomainError);
  CHECK_THROWS_AS(validate(BasisSpec{1, 1.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("cosine, position and quadratic elements match quadrature") {
  const BasisSpec b{40, 1.0, 1.0, 1.0};
  for (int n : {0, 3, 10}) {
    for (int m : {0, 5, 12}) {
      for (int l : {2, 8, 14}) {
        const double q = simpson(
            [&](double x) { return basis_function(n, x, b) * basis_function(m, x, b) * std::cos(l * pi * x); }, 1.0);
        CHECK(cosine_matrix_element(n, m, l) == doctest::Approx(q).epsilon(1e-9).scale(1.0));
      }
      const double qx = simpson([&](double x) { return basis_function(n, x, b) * x * basis_function(m, x, b); }, 1.0);
      CHECK(position_matrix_element(n, m, b) == doctest::Approx(qx).scale(1.0).epsilon(1e-9));
      const double qq = simpson(
          [&](double x) { return basis_function(n, x, b) * (x - 0.5) * (x - 0.5) * basis_function(m, x, b); }, 1.0);
      CHECK(quadratic_matrix_element(n, m, 0.5, b) == doctest::Approx(qq).scale(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("H(s) elements equal K_n delta / s plus <n|V|m>") {
  const BoxPotential p{12, 0.2, 1.0};
  const BasisSpec b{40, 1.0, 1.0, 1.0};
  const double s = 37.0;
  const HamiltonianMatrix h = build_hamiltonian(p, s, b);
  for (int n : {0, 1, 6, 20}) {
    for (int m : {0, 2, 7, 18, 31}) {
      double expect = simpson(
          [&](double x) { return basis_function(n, x, b) * eval_box(p, x) * basis_function(m, x, b); }, 1.0);
      if (n == m) expect += kinetic_eigenvalue(n, b) / s;
      CHECK(h(n, m) == doctest::Approx(expect).scale(1.0).epsilon(1e-9));
    }
  }
  // mirror symmetry: mixed-parity elements vanish
  CHECK(h(0, 1) == 0.0);
  CHECK(h(3, 10) == 0.0);
  CHECK_THROWS_AS(build_hamiltonian(p, 0.0, b), DomainError);
}

TEST_CASE("dense matrix, block storage and apply agree") {
  const BoxPotential p{8, -0.2, 1.0};
  const BasisSpec b{30, 1.0, 1.0, 1.0};
  const HamiltonianMatrix h = build_hamiltonian(p, 5.0, b);
  const Eigen::MatrixXd d = h.dense();
  CHECK((d - d.transpose()).norm() == 0.0);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1.0, 2.0);
  CHECK((h.apply(x) - d * x).norm() < 1e-12);
}

TEST_CASE("convex combination endpoints") {
  const BoxPotential p{8, 0.0, 1.0};
  const BasisSpec b{20, 1.0, 1.0, 1.0};
  const auto h0 = build_convex_combination_hamiltonian(p, 0.0, b);
  CHECK(h0(0, 0) == doctest::Approx(kinetic_eigenvalue(0, b)));
  CHECK(h0(0, 2) == 0.0);
  CHECK_THROWS_AS(build_convex_combination_hamiltonian(p, 1.5, b), DomainError);
}

TEST_CASE("state vectors and position representation") {
  const BasisSpec b{16, 1.0, 1.0, 1.0};
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(16);
  c(0) = 2.0;
  CHECK_THROWS_AS(StateVector(c, b), DomainError);
  const StateVector st = StateVector::normalized(c, b);
  CHECK(st.norm() == doctest::Approx(1.0));
  const std::vector<double> grid{0.25, 0.5};
  const Eigen::VectorXcd psi = to_position(st, grid);
  CHECK(psi(1).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(window_probability(st.coefficients(), b, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(window_probability(st.coefficients(), b, 0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  const auto g = uniform_grid(2.0, 5);
  CHECK(g.back() == 2.0);
  CHECK(g[1] == doctest::Approx(0.5));
}

TEST_CASE("embedded rastrigin expansion reproduces the landscape") {
  const RastriginPotential r{1.0, 0.2, 0.2};
  const double Lb = 4.0;
  const auto e = expand_embedded(r, Lb);
  for (double x : {0.3, 1.7, 2.0, 3.3}) {
    double v = e.constant;
    for (const auto& c : e.cosines) v += c.weight * std::cos(c.l * pi * x / Lb);
    if (e.quadratic) v += e.quadratic->weight * std::pow(x - e.quadratic->center, 2);
    CHECK(v == doctest::Approx(eval_rastrigin(r, x - Lb / 2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(expand_embedded(r, 4.05), DomainError);
}
