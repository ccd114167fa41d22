#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxanneal/hamiltonian.hpp"
#include "boxanneal/potential.hpp"

namespace boxanneal {

/// Linear schedule s(t) = (s_f - s_i) t / T + s_i. s_f == s_i gives a
/// constant Hamiltonian.
struct Schedule {
  double s_i = 1.0;
  double s_f = 1e4;
  double T = 100.0;
};

void validate(const Schedule& sch);

/// Throws DomainError for t outside [0, T].
double schedule_s(const Schedule& sch, double t);

/// Which level of H(s_f) the residual energy is measured against.
struct ReferenceSpec {
  enum class Kind { index, automatic };
  Kind kind = Kind::index;
  int level = 0;

  static ReferenceSpec ground() { return {}; }
  static ReferenceSpec index(int n) { return {Kind::index, n}; }
  static ReferenceSpec automatic() { return {Kind::automatic, 0}; }
};

/// Parses "auto" or "index:N".
ReferenceSpec parse_reference(const std::string& text);
std::string to_string(const ReferenceSpec& ref);

struct ReferenceLevel {
  int level = 0;
  double energy = 0.0;
};

/// Resolves a reference at H(s_f). Index mode diagonalizes for n+1 levels;
/// automatic mode picks the lowest level localized in the adjacent wells
/// (x ~ 2L/mu and its mirror) when a > 0 and the ground level otherwise.
/// Throws DomainError if the requested index is not a computed level and
/// ConvergenceError if no adjacent level is found among `search_levels`.
ReferenceLevel resolve_reference(const BoxPotential& p, double s_f, const BasisSpec& basis, const ReferenceSpec& ref,
                                 int search_levels = 64);

struct IntegratorOptions {
  /// Step control: each step advances the phase of the fastest frequency
  /// present in the state, (K_top - K_0)/s plus the spectral radius of V,
  /// by at most `step_control` radians, and ln s by at most step_control / 10.
  /// K_top is the kinetic energy of the highest sine mode holding more than
  /// 1e-12 of the probability, re-evaluated at every checkpoint.
  double step_control = 0.2;
  /// Richardson check: the error estimate |<H>_h - <H>_{h/2}| / 15 of the
  /// finer run must be below abs_tol + rel_tol * |residual|.
  double abs_tol = 1e-12;
  double rel_tol = 1e-3;
  int max_refinements = 6;
  bool verify = true;
  int checkpoints = 100;
  /// Require E_0 at s_i and s_f to move by less than this when n_dim doubles
  /// (skipped when <= 0).
  double basis_guard = 1e-9;
};

struct Checkpoint {
  double t = 0.0;
  double s = 0.0;
  double norm_drift = 0.0;
  double energy = 0.0;  // <H(s(t))>
};

struct AnnealResult {
  Schedule schedule;
  StateVector final_state;
  double final_energy = 0.0;  // <H(s_f)> in the final state
  ReferenceLevel reference;
  double residual = 0.0;
  double norm_drift = 0.0;  // max over checkpoints of | ||c|| - 1 |
  long steps = 0;           // steps of the accepted run
  double step_control = 0.0;
  double richardson_change = 0.0;  // |<H>_h - <H>_{h/2}|, zero when unverified
  double error_estimate = 0.0;     // richardson_change / 15
  double wall_seconds = 0.0;
  std::vector<Checkpoint> checkpoints;
};

/// Solves i hbar dc/dt = H(s(t)) c from the ground state of H(s_i), per
/// parity block, with the fourth-order commutator-free Magnus scheme: each
/// step is two exponentials of H mixed at the two Gauss points. Each
/// exponential is its (2,2) Pade approximant, a product of two banded
/// complex-symmetric solves; the step is unitary, so the norm is conserved
/// up to rounding.
/// Throws IntegrationError on norm drift above 1e-8 or when the Richardson
/// check still fails after max_refinements halvings.
AnnealResult integrate(const BoxPotential& p, const Schedule& sch, const BasisSpec& basis,
                       const ReferenceSpec& ref = ReferenceSpec::ground(), const IntegratorOptions& options = {});

/// Propagates an arbitrary initial state with a fixed step control, no
/// verification. Returns the final coefficients.
Eigen::VectorXcd propagate(const std::shared_ptr<const PotentialMatrix>& v, const Schedule& sch, const Eigen::VectorXcd& initial,
                           double step_control, std::vector<Checkpoint>* checkpoints = nullptr,
                           int checkpoint_count = 100, long* steps = nullptr);

/// <c|H(s_f)|c> - E_ref.
double residual_energy(const AnnealResult& result, const ReferenceLevel& ref);

/// Result for every T with s_i, s_f from `family` (its T is ignored).
struct ResidualPoint {
  double T = 0.0;
  double v = 0.0;
  double residual = 0.0;
  double norm_drift = 0.0;
  int e_ref_level = 0;
  double e_ref_energy = 0.0;
  long steps = 0;
};

struct ResidualCurve {
  BoxPotential potential;
  BasisSpec basis;
  Schedule family;
  ReferenceSpec reference;
  std::vector<ResidualPoint> points;  // ascending in T (or in v after rescale_to_speed)
};

/// One integrate() per T (T_list strictly increasing), fanned out over
/// `jobs` workers; the reference level is resolved once.
ResidualCurve sweep_T(const BoxPotential& p, const Schedule& family, std::span<const double> T_list,
                      const BasisSpec& basis, const ReferenceSpec& ref, const IntegratorOptions& options = {},
                      int jobs = 1);

/// Reorders the curve by annealing speed v = (s_f - s_i) / T, ascending.
ResidualCurve rescale_to_speed(const ResidualCurve& curve);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least squares y = slope x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log R versus log T over points with T in [T_lo, T_hi].
LineFit loglog_fit(const ResidualCurve& curve, double T_lo, double T_hi);

/// Decay rate gamma of R ~ exp(-gamma T) over points with T in [T_lo, T_hi].
double exponential_rate(const ResidualCurve& curve, double T_lo, double T_hi);

/// Converged basis check: E_0(s) with n_dim and with 2 n_dim.
struct BasisConvergence {
  double e0 = 0.0;
  double e0_doubled = 0.0;
  double change() const { return std::abs(e0_doubled - e0); }
};
BasisConvergence check_basis_convergence(const BoxPotential& p, double s, const BasisSpec& basis);

}  // namespace boxanneal
