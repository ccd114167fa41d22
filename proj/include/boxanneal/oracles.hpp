#pragma once

#include <complex>

namespace boxanneal {

/// Closed-form predictions for the box landscape. Lengths in units of L,
/// energies in units of the potential amplitude; every function is pure.

/// Harmonic zero-point energy of an interior well of H(s):
///   hbar pi mu / (2 sqrt(2 m s) L).
double zero_point_energy(int mu, double s, double L = 1.0, double hbar = 1.0, double m = 1.0);

/// Ground energy of the half oscillator at a wall:
///   3 E_zp sqrt(1 + 8a / mu^2). Throws DomainError if the radicand is <= 0.
double wall_energy(int mu, double a, double s, double L = 1.0, double hbar = 1.0, double m = 1.0);

/// Interior well next to the wall: E_zp + a [1 - cos(4 pi / mu)].
double adjacent_energy(int mu, double a, double s, double L = 1.0, double hbar = 1.0, double m = 1.0);

/// s at which the wall and adjacent energies cross:
///   (pi hbar / (a L sqrt(2 m)))^2 (mu^2 + 8a) / [1 - cos(4 pi / mu)]^2.
/// Throws DomainError for a == 0.
double first_order_point(int mu, double a, double L = 1.0, double hbar = 1.0, double m = 1.0);

/// Large-s plateau of the gap to the m-th interior well for a convex
/// envelope: a [cos(4 m pi / mu) - 1]. Requires 1 <= m < mu / 4.
double flat_gap_value(int m, int mu, double a);

struct AdiabaticParams {
  int mu = 12;
  double a = 0.0;
  double L = 1.0;
  double m = 1.0;
  double hbar = 1.0;
  double s_i = 1.0;
  double s_f = 1e4;
  double T = 1000.0;
};

/// Oscillator frequency of an interior well at s_f: pi mu / (sqrt(2 m s_f) L).
double final_well_frequency(const AdiabaticParams& p);

/// a~ = hbar L sqrt(2 m s_f) / (32 pi).
double adiabatic_prefactor(const AdiabaticParams& p);

/// (a~/T^2)(1 - s_i/s_f)^2 sin^2(omega_f T)(1 - 2/mu).
double adiabatic_residual(const AdiabaticParams& p);

/// The same with the last three factors set to one: a~ / T^2.
double adiabatic_residual_envelope(const AdiabaticParams& p);

/// First-order amplitude of the second oscillator level at t = T,
///   -i hbar <2|dH/dt|0> / D^2 [exp(i T D / hbar) - 1],  D = 2 hbar omega_f,
/// with <2|p^2|0> from the ladder algebra of the final well.
std::complex<double> adiabatic_amplitude_c2(const AdiabaticParams& p);

/// Residual built from c2: D (mu/2 - 1) |c2|^2.
double residual_from_c2(const AdiabaticParams& p);

/// Diabatic transition probability exp(-2 pi gamma^2 / (hbar v)).
/// Throws DomainError for v <= 0 or gamma < 0.
double landau_zener(double gamma, double v, double hbar = 1.0);

/// Gaussian width of a harmonic ground state: sqrt(hbar / (2 sqrt(k m))).
double solution_width(double k, double m, double hbar = 1.0);

}  // namespace boxanneal
