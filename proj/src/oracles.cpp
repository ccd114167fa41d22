#include "boxanneal/oracles.hpp"

#include <cmath>
#include <numbers>

#include "boxanneal/errors.hpp"

namespace boxanneal {

using std::numbers::pi;

double zero_point_energy(int mu, double s, double L, double hbar, double m) {
  if (!(s > 0.0)) throw DomainError("s must be positive");
  return hbar * pi * mu / (2.0 * std::sqrt(2.0 * m * s) * L);
}

double wall_energy(int mu, double a, double s, double L, double hbar, double m) {
  const double radicand = 1.0 + 8.0 * a / (double(mu) * mu);
  if (!(radicand > 0.0)) throw DomainError("wall curvature is not positive (1 + 8a/mu^2 <= 0)");
  return 3.0 * zero_point_energy(mu, s, L, hbar, m) * std::sqrt(radicand);
}

double adjacent_energy(int mu, double a, double s, double L, double hbar, double m) {
  return zero_point_energy(mu, s, L, hbar, m) + a * (1.0 - std::cos(4.0 * pi / mu));
}

double first_order_point(int mu, double a, double L, double hbar, double m) {
  if (a == 0.0) throw DomainError("no first-order point without an envelope (a = 0)");
  const double c = 1.0 - std::cos(4.0 * pi / mu);
  const double q = pi * hbar / (a * L * std::sqrt(2.0 * m));
  return q * q * (double(mu) * mu + 8.0 * a) / (c * c);
}

double flat_gap_value(int m, int mu, double a) {
  if (m < 1 || 4 * m >= mu) throw DomainError("plateau index must satisfy 1 <= m < mu/4");
  return a * (std::cos(4.0 * m * pi / mu) - 1.0);
}

namespace {

void check(const AdiabaticParams& p) {
  if (!(p.s_i > 0.0) || !(p.s_f >= p.s_i)) throw DomainError("need s_f >= s_i > 0");
  if (!(p.T > 0.0)) throw DomainError("annealing time T must be positive");
  if (!(p.m > 0.0) || !(p.hbar > 0.0) || !(p.L > 0.0)) throw DomainError("m, hbar and L must be positive");
}

}  // namespace

double final_well_frequency(const AdiabaticParams& p) {
  check(p);
  return pi * p.mu / (std::sqrt(2.0 * p.m * p.s_f) * p.L);
}

double adiabatic_prefactor(const AdiabaticParams& p) {
  check(p);
  return p.hbar * p.L * std::sqrt(2.0 * p.m * p.s_f) / (32.0 * pi);
}

double adiabatic_residual(const AdiabaticParams& p) {
  const double ratio = 1.0 - p.s_i / p.s_f;
  const double sn = std::sin(final_well_frequency(p) * p.T);
  return adiabatic_residual_envelope(p) * ratio * ratio * sn * sn * (1.0 - 2.0 / p.mu);
}

double adiabatic_residual_envelope(const AdiabaticParams& p) { return adiabatic_prefactor(p) / (p.T * p.T); }

std::complex<double> adiabatic_amplitude_c2(const AdiabaticParams& p) {
  const double omega = final_well_frequency(p);
  const double m_f = p.m * p.s_f;
  // <2|p^2|0> = -(m_f hbar omega / 2) sqrt(2)
  const double p2 = -0.5 * m_f * p.hbar * omega * std::numbers::sqrt2;
  const double hdot = -(p.s_f - p.s_i) / (2.0 * p.m * p.T * p.s_f * p.s_f) * p2;
  const double gap = 2.0 * p.hbar * omega;
  const std::complex<double> i(0.0, 1.0);
  return -i * p.hbar * hdot / (gap * gap) * (std::exp(i * p.T * gap / p.hbar) - 1.0);
}

double residual_from_c2(const AdiabaticParams& p) {
  const double gap = 2.0 * p.hbar * final_well_frequency(p);
  return gap * (0.5 * p.mu - 1.0) * std::norm(adiabatic_amplitude_c2(p));
}

double landau_zener(double gamma, double v, double hbar) {
  if (!(v > 0.0)) throw DomainError("sweep speed v must be positive");
  if (!(gamma >= 0.0)) throw DomainError("half-gap gamma must be non-negative");
  return std::exp(-2.0 * pi * gamma * gamma / (hbar * v));
}

double solution_width(double k, double m, double hbar) {
  if (!(k > 0.0) || !(m > 0.0)) throw DomainError("k and m must be positive");
  return std::sqrt(hbar / (2.0 * std::sqrt(k * m)));
}

}  // namespace boxanneal
