#pragma once

#include <vector>

namespace boxanneal {

/// Multi-well landscape inside the box [0, L]:
///   V(x) = 1/2 [1 - cos(mu pi x / L)] + a [1 - cos(2 pi x / L)].
/// `mu` sets the number of wells (mu/2 + 1 minima including both walls),
/// `a` bends the envelope (a > 0 concave, a < 0 convex, a = 0 flat).
struct BoxPotential {
  int mu = 8;
  double a = 0.0;
  double L = 1.0;
};

/// Harmonic bowl with a superimposed cosine ripple on the whole real line:
///   V(x) = k x^2 / 2 + (h0 / 2) [1 - cos(2 pi x / w0)].
struct RastriginPotential {
  double k = 1.0;
  double h0 = 0.2;
  double w0 = 0.2;
};

/// Throws DomainError unless mu >= 4, mu % 4 == 0 and L > 0.
void validate(const BoxPotential& p);
void validate(const RastriginPotential& p);

double eval_box(const BoxPotential& p, double x);
double eval_rastrigin(const RastriginPotential& p, double x);

// Analytic derivatives of eval_box; no domain check.
double box_slope(const BoxPotential& p, double x);
double box_curvature(const BoxPotential& p, double x);

struct Minimum {
  double x = 0.0;
  double value = 0.0;
  double curvature = 0.0;
  /// Wall minima are half oscillators: the wave function must vanish at the wall.
  bool one_sided = false;
};

/// All mu/2 + 1 minima sorted by x. Interior minimizers are refined by
/// bisection on V' around the seeds 2kL/mu.
std::vector<Minimum> minima(const BoxPotential& p);

/// Approximate position 2L/mu of the interior minimum next to the left wall.
double adjacent_minimum_x(const BoxPotential& p);

}  // namespace boxanneal
