#include "boxanneal/variational.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "boxanneal/errors.hpp"
#include "boxanneal/hamiltonian.hpp"
#include "boxanneal/spectrum.hpp"

namespace boxanneal {

using std::numbers::pi;

namespace {

struct Ripple {
  double q;      // (pi / w0)^2
  double kappa;  // 2 pi / w0
};

Ripple ripple(const RastriginPotential& p) { return {(pi / p.w0) * (pi / p.w0), 2.0 * pi / p.w0}; }

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("gaussian width parameter alpha must be positive");
}

}  // namespace

double evar(double alpha, double x0, double m, const RastriginPotential& p, double hbar) {
  check_alpha(alpha);
  const auto [q, kappa] = ripple(p);
  return hbar * hbar * alpha / (4.0 * m) + 0.5 * p.k * (0.5 / alpha + x0 * x0) +
         0.5 * p.h0 * (1.0 - std::cos(kappa * x0) * std::exp(-q / alpha));
}

Eigen::Vector2d evar_gradient(double alpha, double x0, double m, const RastriginPotential& p, double hbar) {
  check_alpha(alpha);
  const auto [q, kappa] = ripple(p);
  const double env = std::exp(-q / alpha);
  return {hbar * hbar / (4.0 * m) - p.k / (4.0 * alpha * alpha) -
              0.5 * p.h0 * (q / (alpha * alpha)) * std::cos(kappa * x0) * env,
          p.k * x0 + 0.5 * p.h0 * kappa * std::sin(kappa * x0) * env};
}

Eigen::Matrix2d evar_hessian(double alpha, double x0, double m, const RastriginPotential& p, double hbar) {
  check_alpha(alpha);
  (void)m;
  (void)hbar;
  const auto [q, kappa] = ripple(p);
  const double env = std::exp(-q / alpha);
  const double a2 = alpha * alpha;
  const double c = std::cos(kappa * x0);
  const double s = std::sin(kappa * x0);
  Eigen::Matrix2d h;
  h(0, 0) = p.k / (2.0 * a2 * alpha) - 0.5 * p.h0 * c * env * (q * q / (a2 * a2) - 2.0 * q / (a2 * alpha));
  h(0, 1) = h(1, 0) = 0.5 * p.h0 * kappa * s * env * q / a2;
  h(1, 1) = p.k + 0.5 * p.h0 * kappa * kappa * c * env;
  return h;
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::ground_center:
      return "ground_center";
    case Branch::excited_center:
      return "excited_center";
    case Branch::local_min:
      return "local_min";
  }
  return "unknown";
}

namespace {

constexpr int kMaxIterations = 500;

bool positive_definite(const Eigen::Matrix2d& h) { return h(0, 0) > 0.0 && h.determinant() > 0.0; }

// Newton direction with the Hessian's eigenvalues replaced by their moduli
// (floored), which is a descent direction even where the surface is not convex.
Eigen::Vector2d modified_newton(const Eigen::Matrix2d& h, const Eigen::Vector2d& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  Eigen::Vector2d lam = es.eigenvalues().cwiseAbs();
  const double floor = 1e-12 * std::max(lam.maxCoeff(), 1e-300);
  lam = lam.cwiseMax(floor);
  return -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(lam);
}

}  // namespace

std::optional<VariationalPoint> refine_stationary_point(double alpha, double x0, double m,
                                                        const RastriginPotential& p, double hbar) {
  check_alpha(alpha);
  if (!(m > 0.0)) throw DomainError("mass must be positive");
  double e = evar(alpha, x0, m, p, hbar);
  Eigen::Vector2d g = evar_gradient(alpha, x0, m, p, hbar);
  for (int it = 0; it < kMaxIterations && g.norm() >= kGradientTolerance; ++it) {
    const Eigen::Matrix2d h = evar_hessian(alpha, x0, m, p, hbar);
    const Eigen::Vector2d d = modified_newton(h, g);
    bool moved = false;
    for (double t = 1.0; t > 1e-20; t *= 0.5) {
      const double a1 = alpha + t * d(0);
      if (!(a1 > 0.0)) continue;
      const double x1 = x0 + t * d(1);
      const double e1 = evar(a1, x1, m, p, hbar);
      const Eigen::Vector2d g1 = evar_gradient(a1, x1, m, p, hbar);
      // Near convergence E stalls at rounding level; a shrinking gradient
      // then decides.
      if (e1 < e + 1e-4 * t * g.dot(d) || (positive_definite(h) && g1.norm() < g.norm())) {
        alpha = a1;
        x0 = x1;
        e = e1;
        g = g1;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(g.norm() < kGradientTolerance)) return std::nullopt;
  if (!positive_definite(evar_hessian(alpha, x0, m, p, hbar))) return std::nullopt;
  // The surface is very flat along alpha at large m, so a small gradient
  // still leaves alpha loose; polish with plain Newton steps.
  for (int it = 0; it < 8; ++it) {
    const Eigen::Vector2d d = -evar_hessian(alpha, x0, m, p, hbar).ldlt().solve(g);
    if (!(alpha + d(0) > 0.0)) break;
    const Eigen::Vector2d g1 = evar_gradient(alpha + d(0), x0 + d(1), m, p, hbar);
    if (!(g1.norm() < kGradientTolerance)) break;
    alpha += d(0);
    x0 += d(1);
    g = g1;
    if (std::abs(d(0)) <= 1e-13 * alpha && std::abs(d(1)) <= 1e-15) break;
  }
  e = evar(alpha, x0, m, p, hbar);
  if (!positive_definite(evar_hessian(alpha, x0, m, p, hbar))) return std::nullopt;
  VariationalPoint out;
  out.alpha = alpha;
  out.x0 = std::abs(x0);
  out.energy = e;
  out.mass = m;
  return out;
}

namespace {

constexpr double kCenterTolerance = 1e-8;

bool same_point(const VariationalPoint& a, const VariationalPoint& b) {
  return std::abs(a.alpha - b.alpha) <= 1e-6 * std::max(a.alpha, b.alpha) && std::abs(a.x0 - b.x0) <= 1e-7;
}

// Keeps the centred minima and the first side well; assigns kinds.
std::vector<VariationalPoint> classify(std::vector<VariationalPoint> pts, double m, const RastriginPotential& p,
                                       double hbar) {
  std::vector<VariationalPoint> center, side;
  for (auto& pt : pts) {
    if (pt.x0 < kCenterTolerance) {
      pt.x0 = 0.0;
      center.push_back(pt);
    } else if (pt.x0 < 1.5 * p.w0) {
      side.push_back(pt);
    }
  }
  std::sort(center.begin(), center.end(), [](const auto& l, const auto& r) { return l.alpha < r.alpha; });
  std::vector<VariationalPoint> out;
  if (center.size() >= 2) {
    center.front().kind = Branch::ground_center;
    center.back().kind = Branch::excited_center;
    out.push_back(center.front());
    out.push_back(center.back());
  } else if (center.size() == 1) {
    // Wide gaussians sit near sqrt(k m)/hbar, narrow ones near
    // sqrt(k_eff m)/hbar; split at the geometric mean.
    const double k_eff = p.k + 0.5 * p.h0 * ripple(p).kappa * ripple(p).kappa;
    const double split = std::sqrt(std::sqrt(p.k * k_eff) * m) / hbar;
    center.front().kind = center.front().alpha < split ? Branch::ground_center : Branch::excited_center;
    out.push_back(center.front());
  }
  if (!side.empty()) {
    auto best = std::min_element(side.begin(), side.end(), [](const auto& l, const auto& r) {
      return l.energy < r.energy;
    });
    best->kind = Branch::local_min;
    out.push_back(*best);
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.energy < r.energy; });
  return out;
}

std::vector<std::pair<double, double>> seeds(double m, const RastriginPotential& p, double hbar) {
  const auto [q, kappa] = ripple(p);
  const double k_eff = p.k + 0.5 * p.h0 * kappa * kappa;
  std::vector<double> alphas;
  for (double base : {std::sqrt(p.k * m) / hbar, std::sqrt(k_eff * m) / hbar, q})
    for (double f : {0.5, 1.0, 2.0}) alphas.push_back(f * base);
  std::vector<std::pair<double, double>> out;
  for (double x0 : {0.0, p.w0})
    for (double a : alphas) out.emplace_back(a, x0);
  return out;
}

}  // namespace

std::vector<VariationalPoint> find_stationary_points(double m, const RastriginPotential& p, double hbar) {
  validate(p);
  if (!(m > 0.0)) throw DomainError("mass must be positive");
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  const auto tried = seeds(m, p, hbar);
  std::vector<VariationalPoint> found;
  for (const auto& [a, x] : tried) {
    const auto pt = refine_stationary_point(a, x, m, p, hbar);
    if (!pt) continue;
    if (std::none_of(found.begin(), found.end(), [&](const auto& f) { return same_point(f, *pt); }))
      found.push_back(*pt);
  }
  if (found.empty()) {
    std::ostringstream msg;
    msg << "no variational minimum found at m = " << m << "; seeds (alpha, x0) tried:";
    for (const auto& [a, x] : tried) msg << " (" << a << ", " << x << ")";
    throw ConvergenceError(msg.str());
  }
  return classify(std::move(found), m, p, hbar);
}

std::vector<std::vector<VariationalPoint>> track_branches(std::span<const double> masses,
                                                          const RastriginPotential& p, double hbar) {
  for (std::size_t i = 1; i < masses.size(); ++i)
    if (!(masses[i] > masses[i - 1])) throw DomainError("masses must increase");
  std::vector<std::vector<VariationalPoint>> out;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double m = masses[i];
    std::vector<VariationalPoint> fresh = find_stationary_points(m, p, hbar);
    if (i == 0) {
      out.push_back(std::move(fresh));
      continue;
    }
    std::vector<VariationalPoint> cur;
    for (const auto& prev : out.back()) {
      auto pt = refine_stationary_point(prev.alpha, prev.x0, m, p, hbar);
      if (!pt) continue;
      if (pt->x0 < kCenterTolerance) pt->x0 = 0.0;
      // A branch that ended lets Newton slide onto a neighbour; drop it.
      if ((pt->x0 == 0.0) != (prev.x0 == 0.0)) continue;
      pt->kind = prev.kind;
      if (std::none_of(cur.begin(), cur.end(), [&](const auto& c) { return same_point(c, *pt); }))
        cur.push_back(*pt);
    }
    for (const auto& f : fresh) {
      const bool known = std::any_of(cur.begin(), cur.end(), [&](const auto& c) { return same_point(c, f); });
      const bool kind_taken = std::any_of(cur.begin(), cur.end(), [&](const auto& c) { return c.kind == f.kind; });
      if (!known && !kind_taken) cur.push_back(f);
    }
    std::sort(cur.begin(), cur.end(), [](const auto& l, const auto& r) { return l.energy < r.energy; });
    out.push_back(std::move(cur));
  }
  return out;
}

namespace {

const VariationalPoint* find_kind(const std::vector<VariationalPoint>& pts, Branch b) {
  for (const auto& pt : pts)
    if (pt.kind == b) return &pt;
  return nullptr;
}

}  // namespace

double ground_state_transition_mass(const RastriginPotential& p, double hbar, double log_lo, double log_hi) {
  validate(p);
  if (!(log_hi > log_lo)) throw DomainError("empty mass interval");
  constexpr double kScanStep = 0.01;
  const int n = static_cast<int>(std::ceil((log_hi - log_lo) / kScanStep)) + 1;
  std::vector<double> masses(n);
  for (int i = 0; i < n; ++i) masses[i] = std::pow(10.0, log_lo + (log_hi - log_lo) * i / (n - 1));
  const auto tracked = track_branches(masses, p, hbar);

  for (int i = 0; i + 1 < n; ++i) {
    const auto* g0 = find_kind(tracked[i], Branch::ground_center);
    const auto* x0 = find_kind(tracked[i], Branch::excited_center);
    const auto* g1 = find_kind(tracked[i + 1], Branch::ground_center);
    const auto* x1 = find_kind(tracked[i + 1], Branch::excited_center);
    if (!g0 || !x0 || !g1 || !x1) continue;
    const double f0 = x0->energy - g0->energy;
    const double f1 = x1->energy - g1->energy;
    if (f0 > 0.0 && f1 > 0.0) continue;
    if (f0 <= 0.0) break;  // already crossed where both first appear
    // Bisection in log10 m, each branch refined from the lower bracket end.
    double lo = std::log10(masses[i]);
    double hi = std::log10(masses[i + 1]);
    VariationalPoint g = *g0, x = *x0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double m = std::pow(10.0, mid);
      const auto gm = refine_stationary_point(g.alpha, 0.0, m, p, hbar);
      const auto xm = refine_stationary_point(x.alpha, 0.0, m, p, hbar);
      if (!gm || !xm) throw ConvergenceError("lost a centred branch while bisecting the transition");
      if (xm->energy - gm->energy > 0.0) {
        lo = mid;
        g = *gm;
        x = *xm;
      } else {
        hi = mid;
      }
    }
    return std::pow(10.0, 0.5 * (lo + hi));
  }
  std::ostringstream msg;
  msg << "the two x0 = 0 branches do not cross for log10 m in [" << log_lo << ", " << log_hi << "]";
  throw ConvergenceError(msg.str());
}

std::optional<VariationalPoint> branch_point(Branch b, double m, const RastriginPotential& p, double hbar) {
  const auto pts = find_stationary_points(m, p, hbar);
  if (const auto* pt = find_kind(pts, b)) return *pt;
  return std::nullopt;
}

namespace {

std::pair<VariationalPoint, VariationalPoint> gap_pair(double m, const RastriginPotential& p, double hbar) {
  const auto pts = find_stationary_points(m, p, hbar);
  const auto* side = find_kind(pts, Branch::local_min);
  const auto* center = find_kind(pts, Branch::excited_center);
  std::ostringstream msg;
  if (!center) msg << "excited_center branch (narrow x0 = 0 minimum) does not exist at m = " << m;
  else if (!side) msg << "local_min branch (side-well minimum) does not exist at m = " << m;
  if (!center || !side) throw DomainError(msg.str());
  return {*side, *center};
}

}  // namespace

double variational_gap(double m, const RastriginPotential& p, double hbar) {
  const auto [side, center] = gap_pair(m, p, hbar);
  return side.energy - center.energy;
}

double gap_gradient_dm(double m, const RastriginPotential& p, double hbar) {
  const auto [side, center] = gap_pair(m, p, hbar);
  return -hbar * hbar / (4.0 * m * m) * (side.alpha - center.alpha);
}

double energy_mass_derivative(const VariationalPoint& pt, double hbar) {
  return -hbar * hbar * pt.alpha / (4.0 * pt.mass * pt.mass);
}

double width_condition_residual(double alpha, double m, const RastriginPotential& p, double hbar) {
  check_alpha(alpha);
  const double q = ripple(p).q;
  return 0.5 * p.h0 * (q / (alpha * alpha)) * std::exp(-q / alpha) - hbar * hbar / (4.0 * m) +
         p.k / (4.0 * alpha * alpha);
}

double x0_shift_y(double alpha, const RastriginPotential& p) {
  check_alpha(alpha);
  const auto [q, kappa] = ripple(p);
  return -p.k * p.w0 / (p.k + 0.5 * p.h0 * kappa * kappa * std::exp(-q / alpha));
}

EmbeddedLevels box_embedding_crosscheck(double m, const RastriginPotential& p, double hbar, double L_big,
                                        int n_dim, int levels, double guard) {
  validate(p);
  BasisSpec basis{n_dim, L_big, m, hbar};
  validate(basis);
  const PotentialExpansion expansion = expand_embedded(p, L_big);
  auto solve = [&](const BasisSpec& b, int k) {
    auto v = std::make_shared<const PotentialMatrix>(expansion, b);
    return eigensolve(build_hamiltonian(v, 1.0), k, false).energies;
  };
  EmbeddedLevels out;
  out.energies = solve(basis, levels);
  if (guard > 0.0) {
    BasisSpec doubled = basis;
    doubled.n_dim *= 2;
    out.e0_doubled = solve(doubled, 1)(0);
    if (std::abs(out.e0_doubled - out.energies(0)) > guard) {
      std::ostringstream msg;
      msg << "embedded basis not converged: doubling n_dim moves E_0 by " << std::abs(out.e0_doubled - out.energies(0));
      throw ConvergenceError(msg.str());
    }
  }
  return out;
}

}  // namespace boxanneal
