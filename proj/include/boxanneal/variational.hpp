#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxanneal/potential.hpp"

namespace boxanneal {

/// Gaussian trial state psi = (alpha/pi)^(1/4) exp(-alpha (x - x0)^2 / 2) for
/// the Rastrigin landscape on the real line, with the mass m as the control
/// parameter.

/// E^var(alpha, x0) = hbar^2 alpha / (4m) + (k/2)[1/(2 alpha) + x0^2]
///                    + (h0/2)[1 - cos(2 pi x0 / w0) exp(-(pi/w0)^2 / alpha)].
/// Throws DomainError for alpha <= 0.
double evar(double alpha, double x0, double m, const RastriginPotential& p, double hbar = 1.0);

/// (dE/dalpha, dE/dx0).
Eigen::Vector2d evar_gradient(double alpha, double x0, double m, const RastriginPotential& p, double hbar = 1.0);

/// Second derivatives in the same variable order.
Eigen::Matrix2d evar_hessian(double alpha, double x0, double m, const RastriginPotential& p, double hbar = 1.0);

/// Minima are named by the order in which they appear as m grows:
/// ground_center is the wide gaussian at x0 = 0 that is the ground state at
/// small m, excited_center the narrow one at x0 = 0 that appears next and
/// takes over the ground state at the first-order transition, local_min the
/// gaussian in the lowest side well at x0 ~ w0.
enum class Branch { ground_center, excited_center, local_min };
std::string to_string(Branch b);

struct VariationalPoint {
  double alpha = 0.0;
  double x0 = 0.0;  // reported with x0 >= 0; -x0 is the mirror solution
  double energy = 0.0;
  Branch kind = Branch::ground_center;
  double mass = 0.0;
};

/// Converged when the gradient norm drops below this.
inline constexpr double kGradientTolerance = 1e-10;

/// Damped Newton from (alpha, x0) with a regularized Hessian and a
/// backtracking line search on E^var. Returns the point only if it converged
/// to a minimum (positive definite Hessian); `kind` is left unset.
std::optional<VariationalPoint> refine_stationary_point(double alpha, double x0, double m,
                                                        const RastriginPotential& p, double hbar = 1.0);

/// All distinct minima at mass m, sorted by energy. Seeds combine
/// x0 in {0, w0} with alpha candidates around sqrt(k m)/hbar,
/// sqrt(k_eff m)/hbar (k_eff the curvature of a ripple minimum) and
/// (pi/w0)^2. Throws ConvergenceError listing the seeds when none converges.
std::vector<VariationalPoint> find_stationary_points(double m, const RastriginPotential& p, double hbar = 1.0);

/// Minima along an increasing mass grid. Each point is refined from the
/// previous mass's solutions first, so branch identity follows continuity;
/// fresh seeds only add branches that appear. masses must increase.
std::vector<std::vector<VariationalPoint>> track_branches(std::span<const double> masses,
                                                          const RastriginPotential& p, double hbar = 1.0);

/// Mass at which the two x0 = 0 branches have equal energy, by bisection in
/// log10 m on a bracket found by scanning [10^log_lo, 10^log_hi]. Throws
/// ConvergenceError when the branches never cross on the interval (e.g.
/// h0 = 0, where only one branch exists).
double ground_state_transition_mass(const RastriginPotential& p, double hbar = 1.0, double log_lo = 2.5,
                                    double log_hi = 4.0);

/// The minimum of the given branch at m, if it exists.
std::optional<VariationalPoint> branch_point(Branch b, double m, const RastriginPotential& p, double hbar = 1.0);

/// Delta^var = E(local_min) - E(excited_center). Throws DomainError naming
/// the branch that does not exist at m.
double variational_gap(double m, const RastriginPotential& p, double hbar = 1.0);

/// dDelta^var/dm = -hbar^2 / (4 m^2) [alpha(local_min) - alpha(excited_center)].
double gap_gradient_dm(double m, const RastriginPotential& p, double hbar = 1.0);

/// Total derivative of a minimized energy with respect to m at a stationary
/// point: -hbar^2 alpha / (4 m^2).
double energy_mass_derivative(const VariationalPoint& pt, double hbar = 1.0);

/// Residual of the x0-free width condition
///   (h0/2)(pi/(alpha w0))^2 exp(-(pi/w0)^2/alpha) - hbar^2/(4m) + k/(4 alpha^2),
/// which vanishes at x0 = 0 stationary points.
double width_condition_residual(double alpha, double m, const RastriginPotential& p, double hbar = 1.0);

/// Offset y of the side-well centre x0 = w0 + y:
///   y = -k w0 / [k + (h0/2)(2 pi/w0)^2 exp(-(pi/w0)^2 / alpha)].
double x0_shift_y(double alpha, const RastriginPotential& p);

struct EmbeddedLevels {
  Eigen::VectorXd energies;  // lowest levels, ascending
  double e0_doubled = 0.0;   // E_0 with twice the basis
};

/// Diagonalizes the Rastrigin landscape recentred in a box of width L_big
/// (mass m, sine basis of n_dim functions) and returns the lowest `levels`
/// energies. Throws ConvergenceError when doubling n_dim moves E_0 by more
/// than `guard` (skipped when guard <= 0).
EmbeddedLevels box_embedding_crosscheck(double m, const RastriginPotential& p, double hbar, double L_big,
                                        int n_dim, int levels = 2, double guard = 1e-9);

}  // namespace boxanneal
