#include "boxanneal/potential.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "boxanneal/errors.hpp"

namespace boxanneal {

using std::numbers::pi;

void validate(const BoxPotential& p) {
  if (p.mu < 4 || p.mu % 4 != 0)
    throw DomainError("mu must be a positive multiple of four (got " + std::to_string(p.mu) + ")");
  if (!(p.L > 0.0)) throw DomainError("box width L must be positive");
  if (!std::isfinite(p.a)) throw DomainError("envelope amplitude a must be finite");
}

void validate(const RastriginPotential& p) {
  if (!(p.k > 0.0)) throw DomainError("spring constant k must be positive");
  if (!(p.h0 >= 0.0)) throw DomainError("ripple amplitude h0 must be non-negative");
  if (!(p.w0 > 0.0)) throw DomainError("ripple wavelength w0 must be positive");
}

double eval_box(const BoxPotential& p, double x) {
  if (!(x >= 0.0 && x <= p.L)) throw DomainError("coordinate outside the box [0, L]");
  return 0.5 * (1.0 - std::cos(p.mu * pi * x / p.L)) + p.a * (1.0 - std::cos(2.0 * pi * x / p.L));
}

double eval_rastrigin(const RastriginPotential& p, double x) {
  return 0.5 * p.k * x * x + 0.5 * p.h0 * (1.0 - std::cos(2.0 * pi * x / p.w0));
}

double box_slope(const BoxPotential& p, double x) {
  const double q = p.mu * pi / p.L;
  const double g = 2.0 * pi / p.L;
  return 0.5 * q * std::sin(q * x) + p.a * g * std::sin(g * x);
}

double box_curvature(const BoxPotential& p, double x) {
  const double q = p.mu * pi / p.L;
  const double g = 2.0 * pi / p.L;
  return 0.5 * q * q * std::cos(q * x) + p.a * g * g * std::cos(g * x);
}

namespace {

// V' changes sign across [seed - L/(2 mu), seed + L/(2 mu)] because the
// mu-term slope there is +-mu pi / (2L), larger than any envelope slope
// for |a| < mu / 4.
double refine_minimum(const BoxPotential& p, double seed) {
  double lo = seed - 0.5 * p.L / p.mu;
  double hi = seed + 0.5 * p.L / p.mu;
  double f_lo = box_slope(p, lo);
  if (f_lo * box_slope(p, hi) > 0.0) return seed;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = box_slope(p, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Minimum> minima(const BoxPotential& p) {
  validate(p);
  std::vector<Minimum> out;
  out.reserve(p.mu / 2 + 1);
  out.push_back({0.0, eval_box(p, 0.0), box_curvature(p, 0.0), true});
  for (int k = 1; k < p.mu / 2; ++k) {
    const double x = refine_minimum(p, 2.0 * k * p.L / p.mu);
    out.push_back({x, eval_box(p, x), box_curvature(p, x), false});
  }
  out.push_back({p.L, eval_box(p, p.L), box_curvature(p, p.L), true});
  return out;
}

double adjacent_minimum_x(const BoxPotential& p) { return 2.0 * p.L / p.mu; }

}  // namespace boxanneal
