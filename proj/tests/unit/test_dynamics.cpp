#include <doctest.h>

#include <cmath>

#include "boxanneal/dynamics.hpp"
#include "boxanneal/errors.hpp"
#include "boxanneal/spectrum.hpp"

using namespace boxanneal;

TEST_CASE("reference specs parse and print") {
  CHECK(parse_reference("auto").kind == ReferenceSpec::Kind::automatic);
  CHECK(parse_reference("index:6").level == 6);
  CHECK(to_string(parse_reference("index:2")) == "index:2");
  CHECK_THROWS_AS(parse_reference("index:-1"), DomainError);
  CHECK_THROWS_AS(parse_reference("index:2x"), DomainError);
  CHECK_THROWS_AS(parse_reference("ground"), DomainError);
}

TEST_CASE("linear schedule") {
  const Schedule sch{1.0, 1e4, 100.0};
  CHECK(schedule_s(sch, 0.0) == 1.0);
  CHECK(schedule_s(sch, 100.0) == 1e4);
  CHECK(schedule_s(sch, 50.0) == doctest::Approx(5000.5));
  CHECK_THROWS_AS(schedule_s(sch, 101.0), DomainError);
  CHECK_THROWS_AS(validate(Schedule{0.0, 1e4, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(Schedule{10.0, 1.0, 1.0}), DomainError);
  CHECK_NOTHROW(validate(Schedule{10.0, 10.0, 1.0}));
}

TEST_CASE("constant Hamiltonian keeps an eigenstate stationary") {
  const BoxPotential p{8, 0.2, 1.0};
  const BasisSpec b{80, 1.0, 1.0, 1.0};
  const double s = 30.0;
  const Schedule sch{s, s, 200.0};
  const auto v = make_potential_matrix(p, b);
  const Eigenpairs e = eigensolve(build_hamiltonian(v, s), 1);
  const Eigen::VectorXcd c0 = e.vectors.col(0).cast<std::complex<double>>();
  const Eigen::VectorXcd c = propagate(v, sch, c0, 0.2);
  CHECK(std::abs(c0.dot(c)) > 1.0 - 1e-10);
  CHECK(std::abs(c.norm() - 1.0) < 1e-10);
  // phase advances by E_0 T / hbar up to the step error
  const double phase = std::arg(c0.dot(c));
  const double expect = std::remainder(-e.energies(0) * sch.T, 2 * M_PI);
  CHECK(std::abs(std::remainder(phase - expect, 2 * M_PI)) < 1e-6);
}

TEST_CASE("the propagator converges at fourth order") {
  const BoxPotential p{12, 0.0, 1.0};
  const BasisSpec b{60, 1.0, 1.0, 1.0};
  const Schedule sch{1.0, 100.0, 20.0};
  const auto v = make_potential_matrix(p, b);
  const Eigen::VectorXcd c0 = eigensolve(build_hamiltonian(v, 1.0), 1).vectors.col(0).cast<std::complex<double>>();
  const Eigen::VectorXcd c1 = propagate(v, sch, c0, 0.8, nullptr, 4);
  const Eigen::VectorXcd c2 = propagate(v, sch, c0, 0.4, nullptr, 4);
  const Eigen::VectorXcd c3 = propagate(v, sch, c0, 0.2, nullptr, 4);
  const double ratio = (c1 - c2).norm() / (c2 - c3).norm();
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("integrate reports a verified, normalized run") {
  const BoxPotential p{12, 0.0, 1.0};
  const BasisSpec b{60, 1.0, 1.0, 1.0};
  const AnnealResult r = integrate(p, Schedule{1.0, 1e3, 50.0}, b);
  CHECK(r.residual > 0.0);
  CHECK(r.norm_drift < 1e-10);
  CHECK(r.error_estimate <= 1e-12 + 1e-3 * r.residual);
  CHECK(r.richardson_change == doctest::Approx(15.0 * r.error_estimate));
  CHECK(r.checkpoints.size() == 101);
  CHECK(r.checkpoints.back().s == 1e3);
  CHECK(r.final_energy == doctest::Approx(r.checkpoints.back().energy));
  CHECK(r.reference.level == 0);
}

TEST_CASE("basis guard rejects an under-resolved basis") {
  const BoxPotential p{12, 0.0, 1.0};
  IntegratorOptions opt;
  opt.verify = false;
  CHECK_THROWS_AS(integrate(p, Schedule{1.0, 1e4, 10.0}, BasisSpec{30, 1.0, 1.0, 1.0}, ReferenceSpec::ground(), opt),
                  ConvergenceError);
}

TEST_CASE("speed rescaling and fits") {
  ResidualCurve curve;
  curve.family = Schedule{1.0, 1001.0, 1.0};
  for (double T : {10.0, 100.0, 1000.0}) curve.points.push_back({T, 0.0, 3.0 / (T * T), 0.0, 0, 0.0, 0});
  const ResidualCurve byv = rescale_to_speed(curve);
  CHECK(byv.points.front().v == doctest::Approx(1.0));
  CHECK(byv.points.back().v == doctest::Approx(100.0));
  CHECK(byv.points.front().T == 1000.0);
  const LineFit fit = loglog_fit(curve, 1.0, 1e4);
  CHECK(fit.slope == doctest::Approx(-2.0));
  CHECK(fit.points == 3);

  ResidualCurve expo;
  for (double T : {100.0, 200.0, 300.0, 400.0}) expo.points.push_back({T, 0.0, 0.5 * std::exp(-0.0023 * T), 0.0, 0, 0.0, 0});
  CHECK(exponential_rate(expo, 150.0, 400.0) == doctest::Approx(0.0023));
  CHECK_THROWS_AS(exponential_rate(expo, 350.0, 400.0), DomainError);
}

TEST_CASE("automatic reference picks the adjacent level for a concave envelope") {
  const BoxPotential p{8, 0.2, 1.0};
  const BasisSpec b{400, 1.0, 1.0, 1.0};
  const ReferenceLevel r = resolve_reference(p, std::pow(10.0, 4.5), b, ReferenceSpec::automatic());
  CHECK(r.level == 2);
  const ReferenceLevel g = resolve_reference(BoxPotential{8, -0.2, 1.0}, 1e4, b, ReferenceSpec::automatic());
  CHECK(g.level == 0);
}
