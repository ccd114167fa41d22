#include "boxanneal/dynamics.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "boxanneal/errors.hpp"
#include "boxanneal/parallel.hpp"
#include "boxanneal/spectrum.hpp"

namespace boxanneal {

void validate(const Schedule& sch) {
  if (!(sch.s_i > 0.0)) throw DomainError("initial s_i must be positive");
  if (!(sch.s_f >= sch.s_i)) throw DomainError("final s_f must not be below s_i");
  if (!(sch.T > 0.0) || !std::isfinite(sch.T)) throw DomainError("annealing time T must be positive");
}

double schedule_s(const Schedule& sch, double t) {
  if (!(t >= 0.0 && t <= sch.T)) throw DomainError("time outside [0, T]");
  return (sch.s_f - sch.s_i) * (t / sch.T) + sch.s_i;
}

ReferenceSpec parse_reference(const std::string& text) {
  if (text == "auto") return ReferenceSpec::automatic();
  if (text.rfind("index:", 0) == 0) {
    const std::string num = text.substr(6);
    std::size_t used = 0;
    int n = -1;
    try {
      n = std::stoi(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == num.size() && !num.empty() && n >= 0) return ReferenceSpec::index(n);
  }
  throw DomainError("reference must be 'auto' or 'index:N' with N >= 0 (got '" + text + "')");
}

std::string to_string(const ReferenceSpec& ref) {
  return ref.kind == ReferenceSpec::Kind::automatic ? "auto" : "index:" + std::to_string(ref.level);
}

ReferenceLevel resolve_reference(const BoxPotential& p, double s_f, const BasisSpec& basis, const ReferenceSpec& ref,
                                 int search_levels) {
  const HamiltonianMatrix h = build_hamiltonian(p, s_f, basis);
  if (ref.kind == ReferenceSpec::Kind::index) {
    if (ref.level < 0 || ref.level >= basis.n_dim)
      throw DomainError("reference level " + std::to_string(ref.level) + " is not among the " +
                        std::to_string(basis.n_dim) + " computable levels");
    const Eigenpairs e = eigensolve(h, ref.level + 1, false);
    return {ref.level, e.energies(ref.level)};
  }
  if (!(p.a > 0.0)) {
    const Eigenpairs e = eigensolve(h, 1, false);
    return {0, e.energies(0)};
  }
  const Eigenpairs e = eigensolve(h, std::min(search_levels, basis.n_dim), true);
  const auto n = identify_level(e, p, basis, WellKind::adjacent);
  if (!n)
    throw ConvergenceError("no level among the lowest " + std::to_string(e.energies.size()) +
                           " is localized in the adjacent wells");
  return {*n, e.energies(*n)};
}

namespace {

double expectation(const HamiltonianMatrix& h, const Eigen::VectorXcd& c) {
  return c.dot(h.apply(c)).real() / c.squaredNorm();
}

// Gershgorin enclosure [lo, hi] of the spectrum of V.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;
};

Enclosure gershgorin(const PotentialMatrix& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Parity par : {Parity::even, Parity::odd}) {
    const auto& blk = v.block(par);
    const Eigen::Index n = blk.size();
    Eigen::VectorXd off = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index d = 1; d <= blk.bandwidth() && j + d < n; ++d) {
        off(j) += std::abs(blk.band()(d, j));
        off(j + d) += std::abs(blk.band()(d, j));
      }
    for (Eigen::Index j = 0; j < n; ++j) {
      lo = std::min(lo, blk.band()(0, j) - off(j));
      hi = std::max(hi, blk.band()(0, j) + off(j));
    }
  }
  return {lo, hi};
}

// Integral over [ta, tb] of the step-control rate
//   ((K_top - K_0) / s + w_V) / hbar + kRateWeight * (ds/dt) / s,
// where K_top is the kinetic energy of the highest populated sine mode and
// w_V the width of the Gershgorin enclosure of V: the fastest phase present
// in the state relative to the shifted spectrum, plus the relative rate at
// which H(s) itself changes.
constexpr double kRateWeight = 10.0;

double phase_budget(const PotentialMatrix& v, double v_width, const Schedule& sch, double k_top, double ta,
                    double tb) {
  const double spread = k_top - kinetic_eigenvalue(0, v.basis());
  double kinetic = 0.0;
  double change = 0.0;
  if (sch.s_f == sch.s_i) {
    kinetic = spread * (tb - ta) / sch.s_i;
  } else {
    const double log_ratio = std::log(schedule_s(sch, tb) / schedule_s(sch, ta));
    kinetic = spread * sch.T / (sch.s_f - sch.s_i) * log_ratio;
    change = kRateWeight * log_ratio;
  }
  return (kinetic + v_width * (tb - ta)) / v.basis().hbar + change;
}

// Kinetic energy of the highest mode that matters: modes above it hold a
// total probability below kTailProbability.
constexpr double kTailProbability = 1e-12;

double populated_kinetic_top(const std::vector<Eigen::VectorXcd>& blocks, const BasisSpec& basis) {
  double tail = 0.0;
  for (int n = basis.n_dim - 1; n > 0; --n) {
    tail += std::norm(blocks[n % 2](n / 2));
    if (tail >= kTailProbability) return kinetic_eigenvalue(std::min(n + 1, basis.n_dim - 1), basis);
  }
  return kinetic_eigenvalue(1, basis);
}

// One parity block. A step applies exp(-i dt H / hbar) through its (2,2)
// Pade approximant, which factors into two Cayley solves
//   (1 + i tau_k H) c' = (1 - i tau_k H) c,  tau_k = dt / (hbar r_k),
// with r_k = 3 +- i sqrt(3) the roots of 1 - z/2 + z^2/12. The product is
// unitary for Hermitian H and its phase error is O((E dt)^5). H is shifted
// by a lower bound of its spectrum so that the imaginary part of every
// factored matrix is positive semidefinite.
constexpr double kSqrt3 = 1.7320508075688772;
constexpr std::array<double, 2> kGauss{0.5 - kSqrt3 / 6.0, 0.5 + kSqrt3 / 6.0};
constexpr std::array<double, 2> kMix{(3.0 - 2.0 * kSqrt3) / 12.0, (3.0 + 2.0 * kSqrt3) / 12.0};

class BlockStepper {
 public:
  using cd = std::complex<double>;

  BlockStepper(const PotentialMatrix& v, Parity p) : v_(v.block(p)), a_(v_.size(), v_.bandwidth()) {
    const int par = static_cast<int>(p);
    kinetic_.resize(v_.size());
    for (Eigen::Index i = 0; i < v_.size(); ++i)
      kinetic_(i) = kinetic_eigenvalue(static_cast<int>(2 * i + par), v.basis());
  }

  /// Applies the Pade(2,2) form of exp(-i dt A / hbar) with
  /// A = kappa K + w V - shift; the shift only changes the global phase.
  void step(Eigen::VectorXcd& c, double kappa, double w, double shift, double dt_over_hbar) {
    diag_ = kappa * kinetic_;
    diag_.array() -= shift;
    w_ = w;
    for (const cd r : kRoots) cayley(c, dt_over_hbar / r);
  }

 private:
  static constexpr std::array<cd, 2> kRoots{cd(3.0, 1.7320508075688772), cd(3.0, -1.7320508075688772)};

  void cayley(Eigen::VectorXcd& c, cd tau) {
    const cd it = cd(0.0, 1.0) * tau;
    Eigen::VectorXcd rhs = w_ * band_multiply(v_, c);
    rhs.array() += diag_.array().cast<cd>() * c.array();
    rhs = c - it * rhs;

    a_.band() = (it * w_) * v_.band().cast<cd>();
    a_.band().row(0).array() += 1.0 + it * diag_.transpose().array().cast<cd>();
    if (!band_ldlt_factor(a_)) throw ConvergenceError("zero pivot in the propagator factorization");
    band_ldlt_solve(a_, rhs);
    c = std::move(rhs);
  }

  const SymmetricBandMatrix<double>& v_;
  SymmetricBandMatrix<cd> a_;
  Eigen::VectorXd kinetic_;
  Eigen::VectorXd diag_;
  double w_ = 1.0;
};

}  // namespace

Eigen::VectorXcd propagate(const std::shared_ptr<const PotentialMatrix>& vp, const Schedule& sch,
                           const Eigen::VectorXcd& initial, double step_control, std::vector<Checkpoint>* checkpoints,
                           int checkpoint_count, long* steps) {
  const PotentialMatrix& v = *vp;
  validate(sch);
  if (!(step_control > 0.0)) throw DomainError("step control must be positive");
  if (initial.size() != v.n_dim()) throw DomainError("initial state has the wrong dimension");
  checkpoint_count = std::max(checkpoint_count, 1);
  const double hbar = v.basis().hbar;

  std::vector<Eigen::VectorXcd> blocks(2);
  std::vector<std::optional<BlockStepper>> steppers(2);
  for (int p = 0; p < 2; ++p) {
    const Eigen::Index m = v.block(static_cast<Parity>(p)).size();
    blocks[p].resize(m);
    for (Eigen::Index i = 0; i < m; ++i) blocks[p](i) = initial(2 * i + p);
    if (blocks[p].cwiseAbs().maxCoeff() > 0.0) steppers[p].emplace(v, static_cast<Parity>(p));
  }
  auto assemble = [&] {
    Eigen::VectorXcd c(v.n_dim());
    for (int p = 0; p < 2; ++p)
      for (Eigen::Index i = 0; i < blocks[p].size(); ++i) c(2 * i + p) = blocks[p](i);
    return c;
  };

  const Enclosure enclosure = gershgorin(v);
  const double k0 = kinetic_eigenvalue(0, v.basis());
  const double norm0 = initial.norm();
  long total = 0;
  auto record = [&](double t) {
    if (!checkpoints) return;
    const Eigen::VectorXcd c = assemble();
    const double s = schedule_s(sch, t);
    const HamiltonianMatrix h = build_hamiltonian(vp, s);
    checkpoints->push_back({t, s, std::abs(c.norm() - norm0), expectation(h, c)});
  };
  if (checkpoints) checkpoints->clear();
  record(0.0);

  double removed_phase = 0.0;  // sum of shift * dt / hbar, restored at the end
  for (int seg = 0; seg < checkpoint_count; ++seg) {
    const double ta = sch.T * seg / checkpoint_count;
    const double tb = seg + 1 == checkpoint_count ? sch.T : sch.T * (seg + 1) / checkpoint_count;
    const double k_top = populated_kinetic_top(blocks, v.basis());
    const long n = std::max(
        1L, static_cast<long>(std::ceil(phase_budget(v, enclosure.hi - enclosure.lo, sch, k_top, ta, tb) / step_control)));
    const double dt = (tb - ta) / n;
    for (long k = 0; k < n; ++k) {
      const double t0 = ta + k * dt;
      const double inv1 = 1.0 / schedule_s(sch, t0 + kGauss[0] * dt);
      const double inv2 = 1.0 / schedule_s(sch, t0 + kGauss[1] * dt);
      // Commutator-free fourth-order Magnus: two exponentials of H mixed at
      // the Gauss points, each with half the potential.
      for (const auto& [wa, wb] : {std::pair{kMix[1], kMix[0]}, std::pair{kMix[0], kMix[1]}}) {
        const double kappa = wa * inv1 + wb * inv2;
        if (!(kappa > 0.0)) throw IntegrationError("step too long for the Magnus splitting", t0);
        const double shift = kappa * k0 + 0.5 * enclosure.lo;
        for (int p = 0; p < 2; ++p)
          if (steppers[p]) steppers[p]->step(blocks[p], kappa, 0.5, shift, dt / hbar);
        removed_phase += shift * dt / hbar;
      }
    }
    total += n;
    double nrm = 0.0;
    for (int p = 0; p < 2; ++p) nrm += blocks[p].squaredNorm();
    const double drift = std::abs(std::sqrt(nrm) - norm0);
    if (drift > StateVector::kNormTolerance) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " exceeds " << StateVector::kNormTolerance;
      throw IntegrationError(msg.str(), tb);
    }
    record(tb);
  }
  if (steps) *steps = total;
  const std::complex<double> restore = std::polar(1.0, -std::remainder(removed_phase, 2.0 * std::numbers::pi));
  for (int p = 0; p < 2; ++p) blocks[p] *= restore;
  return assemble();
}

BasisConvergence check_basis_convergence(const BoxPotential& p, double s, const BasisSpec& basis) {
  BasisSpec doubled = basis;
  doubled.n_dim *= 2;
  BasisConvergence out;
  out.e0 = eigensolve(build_hamiltonian(p, s, basis), 1, false).energies(0);
  out.e0_doubled = eigensolve(build_hamiltonian(p, s, doubled), 1, false).energies(0);
  return out;
}

namespace {

void guard_basis(const BoxPotential& p, const Schedule& sch, const BasisSpec& basis, double tol) {
  if (!(tol > 0.0)) return;
  for (double s : {sch.s_i, sch.s_f}) {
    const BasisConvergence c = check_basis_convergence(p, s, basis);
    if (c.change() >= tol) {
      std::ostringstream msg;
      msg << "basis not converged at s = " << s << ": doubling n_dim moves E_0 by " << c.change();
      throw ConvergenceError(msg.str());
    }
  }
}

struct Prepared {
  std::shared_ptr<const PotentialMatrix> v;
  Eigen::VectorXcd initial;
  ReferenceLevel reference;
};

Prepared prepare(const BoxPotential& p, const Schedule& sch, const BasisSpec& basis, const ReferenceSpec& ref,
                 const IntegratorOptions& options) {
  validate(p);
  validate(basis);
  validate(sch);
  guard_basis(p, sch, basis, options.basis_guard);
  Prepared out;
  out.v = make_potential_matrix(p, basis);
  const Eigenpairs g = eigensolve(build_hamiltonian(out.v, sch.s_i), 1, true);
  out.initial = g.vectors.col(0).cast<std::complex<double>>();
  out.reference = resolve_reference(p, sch.s_f, basis, ref);
  return out;
}

// Global error of a fourth-order method at step h/2 is about
// |E_h - E_{h/2}| / (2^4 - 1).
constexpr double kRichardsonDivisor = 15.0;

AnnealResult run_prepared(const Prepared& prep, const Schedule& sch, const IntegratorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const HamiltonianMatrix h_final = build_hamiltonian(prep.v, sch.s_f);

  double h = options.step_control;
  std::vector<Checkpoint> cps;
  long steps = 0;
  Eigen::VectorXcd c = propagate(prep.v, sch, prep.initial, h, &cps, options.checkpoints, &steps);
  double energy = expectation(h_final, c);
  double change = 0.0;

  if (options.verify) {
    for (int r = 0;; ++r) {
      std::vector<Checkpoint> cps_fine;
      long steps_fine = 0;
      Eigen::VectorXcd c_fine = propagate(prep.v, sch, prep.initial, 0.5 * h, &cps_fine, options.checkpoints,
                                          &steps_fine);
      const double e_fine = expectation(h_final, c_fine);
      change = std::abs(e_fine - energy);
      h *= 0.5;
      c = std::move(c_fine);
      cps = std::move(cps_fine);
      steps = steps_fine;
      energy = e_fine;
      const double residual = std::abs(energy - prep.reference.energy);
      if (change / kRichardsonDivisor < options.abs_tol + options.rel_tol * residual) break;
      if (r + 1 >= options.max_refinements) {
        std::ostringstream msg;
        msg << "step refinement did not converge: <H(s_f)> still changes by " << change << " at step control " << h;
        throw IntegrationError(msg.str(), sch.T);
      }
    }
  }

  double drift = 0.0;
  for (const auto& cp : cps) drift = std::max(drift, cp.norm_drift);
  AnnealResult out{.schedule = sch,
                   .final_state = StateVector(c, prep.v->basis()),
                   .final_energy = energy,
                   .reference = prep.reference,
                   .residual = energy - prep.reference.energy,
                   .norm_drift = drift,
                   .steps = steps,
                   .step_control = h,
                   .richardson_change = change,
                   .error_estimate = change / kRichardsonDivisor,
                   .wall_seconds = 0.0,
                   .checkpoints = std::move(cps)};
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

AnnealResult integrate(const BoxPotential& p, const Schedule& sch, const BasisSpec& basis, const ReferenceSpec& ref,
                       const IntegratorOptions& options) {
  return run_prepared(prepare(p, sch, basis, ref, options), sch, options);
}

double residual_energy(const AnnealResult& result, const ReferenceLevel& ref) {
  return result.final_energy - ref.energy;
}

ResidualCurve sweep_T(const BoxPotential& p, const Schedule& family, std::span<const double> T_list,
                      const BasisSpec& basis, const ReferenceSpec& ref, const IntegratorOptions& options, int jobs) {
  if (T_list.empty()) throw DomainError("T list must not be empty");
  for (std::size_t i = 0; i < T_list.size(); ++i) {
    if (!(T_list[i] > 0.0)) throw DomainError("annealing times must be positive");
    if (i > 0 && !(T_list[i] > T_list[i - 1])) throw DomainError("T list must be strictly increasing");
  }
  Schedule first = family;
  first.T = T_list.front();
  const Prepared prep = prepare(p, first, basis, ref, options);

  ResidualCurve curve{p, basis, family, ref, std::vector<ResidualPoint>(T_list.size())};
  parallel_for(static_cast<int>(T_list.size()), jobs, [&](int i) {
    Schedule sch = family;
    sch.T = T_list[i];
    const AnnealResult r = run_prepared(prep, sch, options);
    curve.points[i] = {sch.T,           (sch.s_f - sch.s_i) / sch.T, r.residual, r.norm_drift,
                       r.reference.level, r.reference.energy,          r.steps};
  });
  return curve;
}

ResidualCurve rescale_to_speed(const ResidualCurve& curve) {
  ResidualCurve out = curve;
  for (auto& pt : out.points) pt.v = (curve.family.s_f - curve.family.s_i) / pt.T;
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const ResidualPoint& l, const ResidualPoint& r) { return l.v < r.v; });
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("fit inputs differ in length");
  if (x.size() < 2) throw DomainError("a line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("a line fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, static_cast<int>(x.size())};
}

namespace {

void collect(const ResidualCurve& curve, double T_lo, double T_hi, bool log_x, std::vector<double>& x,
             std::vector<double>& y) {
  for (const auto& pt : curve.points) {
    if (pt.T < T_lo || pt.T > T_hi) continue;
    if (!(pt.residual > 0.0)) throw DomainError("residual energy must be positive to take its logarithm");
    x.push_back(log_x ? std::log10(pt.T) : pt.T);
    y.push_back(log_x ? std::log10(pt.residual) : std::log(pt.residual));
  }
}

}  // namespace

LineFit loglog_fit(const ResidualCurve& curve, double T_lo, double T_hi) {
  std::vector<double> x, y;
  collect(curve, T_lo, T_hi, true, x, y);
  return fit_line(x, y);
}

double exponential_rate(const ResidualCurve& curve, double T_lo, double T_hi) {
  std::vector<double> x, y;
  collect(curve, T_lo, T_hi, false, x, y);
  return -fit_line(x, y).slope;
}

}  // namespace boxanneal
