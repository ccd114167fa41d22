#include "boxanneal/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "boxanneal/errors.hpp"

namespace boxanneal {

using std::numbers::pi;

void validate(const BasisSpec& basis) {
  if (basis.n_dim < 2) throw DomainError("basis needs n_dim >= 2");
  if (!(basis.L > 0.0) || !(basis.mass > 0.0) || !(basis.hbar > 0.0))
    throw DomainError("L, mass and hbar must be positive");
}

double kinetic_eigenvalue(int n, const BasisSpec& basis) {
  if (n < 0) throw DomainError("basis index must be non-negative");
  const double k = (n + 1) * pi * basis.hbar / basis.L;
  return k * k / (2.0 * basis.mass);
}

double basis_function(int n, double x, const BasisSpec& basis) {
  if (n < 0) throw DomainError("basis index must be non-negative");
  if (!(x >= 0.0 && x <= basis.L)) throw DomainError("coordinate outside the box [0, L]");
  return std::sqrt(2.0 / basis.L) * std::sin((n + 1) * pi * x / basis.L);
}

double cosine_matrix_element(int n, int m, int l) {
  auto delta = [](int p) { return p == 0 ? 1.0 : 0.0; };
  return 0.5 * (delta(n - m + l) + delta(n - m - l) - delta(n + m + 2 - l));
}

namespace {

// Integrals of x^k cos(j pi x / L) over [0, L] for k = 1, 2.
double cos_moment1(int j, double L) {
  if (j == 0) return 0.5 * L * L;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  return L * L * (sign - 1.0) / (j * j * pi * pi);
}

double cos_moment2(int j, double L) {
  if (j == 0) return L * L * L / 3.0;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  return 2.0 * L * L * L * sign / (j * j * pi * pi);
}

}  // namespace

double position_matrix_element(int n, int m, const BasisSpec& basis) {
  const int j = std::abs(n - m);
  const int k = n + m + 2;
  return (cos_moment1(j, basis.L) - cos_moment1(k, basis.L)) / basis.L;
}

double quadratic_matrix_element(int n, int m, double center, const BasisSpec& basis) {
  const int j = std::abs(n - m);
  const int k = n + m + 2;
  const double x2 = (cos_moment2(j, basis.L) - cos_moment2(k, basis.L)) / basis.L;
  const double x1 = (cos_moment1(j, basis.L) - cos_moment1(k, basis.L)) / basis.L;
  return x2 - 2.0 * center * x1 + (n == m ? center * center : 0.0);
}

PotentialExpansion expand(const BoxPotential& p) {
  validate(p);
  PotentialExpansion v;
  v.constant = 0.5 + p.a;
  v.cosines.push_back({p.mu, -0.5});
  if (p.a != 0.0) v.cosines.push_back({2, -p.a});
  return v;
}

PotentialExpansion expand_embedded(const RastriginPotential& p, double L_big) {
  validate(p);
  if (!(L_big > 0.0)) throw DomainError("embedding box width must be positive");
  const double ratio = 2.0 * L_big / p.w0;
  const long l = std::lround(ratio);
  if (std::abs(ratio - l) > 1e-9 || l < 2 || l % 2 != 0)
    throw DomainError("embedding box width must be a positive multiple of w0");
  // cos(2 pi (x - L/2) / w0) = (-1)^(l/2) cos(l pi x / L)
  const double sign = ((l / 2) % 2 == 0) ? 1.0 : -1.0;
  PotentialExpansion v;
  v.constant = 0.5 * p.h0;
  if (p.h0 != 0.0) v.cosines.push_back({static_cast<int>(l), -0.5 * p.h0 * sign});
  v.quadratic = QuadraticTerm{0.5 * L_big, 0.5 * p.k};
  return v;
}

namespace {

double expansion_entry(const PotentialExpansion& v, int n, int m, const BasisSpec& basis) {
  double e = (n == m) ? v.constant : 0.0;
  for (const auto& c : v.cosines) e += c.weight * cosine_matrix_element(n, m, c.l);
  if (v.quadratic) e += v.quadratic->weight * quadratic_matrix_element(n, m, v.quadratic->center, basis);
  return e;
}

}  // namespace

PotentialMatrix::PotentialMatrix(const PotentialExpansion& v, const BasisSpec& basis) : basis_(basis) {
  validate(basis);
  for (const auto& c : v.cosines)
    if (c.l < 2 || c.l % 2 != 0) throw DomainError("cosine harmonics must be even and >= 2 (mirror symmetry)");
  if (v.quadratic && std::abs(v.quadratic->center - 0.5 * basis.L) > 1e-12 * basis.L)
    throw DomainError("parabola must be centred in the box (mirror symmetry)");

  const int n = basis.n_dim;
  if (v.quadratic) {
    bandwidth_ = n - 1;
  } else {
    bandwidth_ = 0;
    for (const auto& c : v.cosines) bandwidth_ = std::max(bandwidth_, c.l);
    bandwidth_ = std::min(bandwidth_, n - 1);
  }
  for (int p = 0; p < 2; ++p) {
    const int size = (n + 1 - p) / 2;
    auto& blk = blocks_[p];
    blk = SymmetricBandMatrix<double>(size, bandwidth_ / 2);
    for (int j = 0; j < size; ++j)
      for (int d = 0; d <= blk.bandwidth() && j + d < size; ++d)
        blk.band()(d, j) = expansion_entry(v, 2 * (j + d) + p, 2 * j + p, basis);
  }
}

double PotentialMatrix::operator()(int n, int m) const {
  if ((n - m) % 2 != 0) return 0.0;
  return blocks_[n % 2](n / 2, m / 2);
}

double PotentialMatrix::norm_inf() const { return std::max(blocks_[0].norm_inf(), blocks_[1].norm_inf()); }

std::shared_ptr<const PotentialMatrix> make_potential_matrix(const BoxPotential& p, const BasisSpec& basis) {
  return std::make_shared<const PotentialMatrix>(expand(p), basis);
}

HamiltonianMatrix::HamiltonianMatrix(std::shared_ptr<const PotentialMatrix> v, double kinetic_scale,
                                     double potential_scale)
    : v_(std::move(v)), kinetic_scale_(kinetic_scale), potential_scale_(potential_scale) {}

double HamiltonianMatrix::operator()(int n, int m) const {
  double e = potential_scale_ * (*v_)(n, m);
  if (n == m) e += kinetic_scale_ * kinetic_eigenvalue(n, basis());
  return e;
}

SymmetricBandMatrix<double> HamiltonianMatrix::block(Parity p) const {
  SymmetricBandMatrix<double> out = v_->block(p);
  out.band() *= potential_scale_;
  const int par = static_cast<int>(p);
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out.band()(0, i) += kinetic_scale_ * kinetic_eigenvalue(static_cast<int>(2 * i + par), basis());
  return out;
}

Eigen::MatrixXd HamiltonianMatrix::dense() const {
  const int n = n_dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < 2; ++p) {
    const Eigen::MatrixXd b = block(static_cast<Parity>(p)).to_dense();
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) h(2 * i + p, 2 * j + p) = b(i, j);
  }
  return h;
}

double HamiltonianMatrix::norm_inf() const {
  return std::max(block(Parity::even).norm_inf(), block(Parity::odd).norm_inf());
}

HamiltonianMatrix build_hamiltonian(const BoxPotential& p, double s, const BasisSpec& basis) {
  if (!(s > 0.0)) throw DomainError("annealing parameter s must be positive");
  return build_hamiltonian(make_potential_matrix(p, basis), s);
}

HamiltonianMatrix build_hamiltonian(std::shared_ptr<const PotentialMatrix> v, double s) {
  if (!(s > 0.0)) throw DomainError("annealing parameter s must be positive");
  return HamiltonianMatrix(std::move(v), 1.0 / s, 1.0);
}

HamiltonianMatrix build_convex_combination_hamiltonian(const BoxPotential& p, double tau, const BasisSpec& basis) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0, 1]");
  return HamiltonianMatrix(make_potential_matrix(p, basis), 1.0 - tau, tau);
}

StateVector::StateVector(Eigen::VectorXcd coefficients, BasisSpec basis)
    : c_(std::move(coefficients)), basis_(basis) {
  validate(basis_);
  if (c_.size() != basis_.n_dim) throw DomainError("coefficient vector length must equal n_dim");
  if (std::abs(c_.norm() - 1.0) > kNormTolerance) throw DomainError("state vector is not normalized");
}

StateVector StateVector::normalized(Eigen::VectorXcd coefficients, BasisSpec basis) {
  const double nrm = coefficients.norm();
  if (!(nrm > 0.0)) throw DomainError("cannot normalize a zero vector");
  coefficients /= nrm;
  return StateVector(std::move(coefficients), basis);
}

Eigen::VectorXcd to_position(const StateVector& state, std::span<const double> grid) {
  return to_position(state.coefficients(), state.basis(), grid);
}

Eigen::VectorXcd to_position(const Eigen::Ref<const Eigen::VectorXcd>& c, const BasisSpec& basis,
                             std::span<const double> grid) {
  const double norm = std::sqrt(2.0 / basis.L);
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    if (!(x >= 0.0 && x <= basis.L)) throw DomainError("grid point outside the box [0, L]");
    // sin((n+1) theta) = Im(z^(n+1)) with z = exp(i theta); the phasor recurrence is norm-stable.
    const double theta = pi * x / basis.L;
    const std::complex<double> step(std::cos(theta), std::sin(theta));
    std::complex<double> z = step;
    std::complex<double> acc = 0.0;
    for (Eigen::Index n = 0; n < c.size(); ++n) {
      acc += c(n) * z.imag();
      z *= step;
    }
    psi(static_cast<Eigen::Index>(g)) = norm * acc;
  }
  return psi;
}

std::vector<double> uniform_grid(double L, int count) {
  if (count < 2) throw DomainError("grid needs at least two points");
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = L * i / (count - 1);
  x.back() = L;
  return x;
}

double window_probability(const Eigen::Ref<const Eigen::VectorXcd>& c, const BasisSpec& basis, double lo, double hi,
                          int points) {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, basis.L);
  if (!(hi > lo)) return 0.0;
  if (points % 2 == 0) ++points;
  std::vector<double> grid(points);
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo + i * h;
  grid.back() = hi;
  const Eigen::VectorXcd psi = to_position(c, basis, grid);
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::norm(psi(i));
  }
  return sum * h / 3.0;
}

}  // namespace boxanneal
