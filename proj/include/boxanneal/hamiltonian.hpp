#pragma once

#include <Eigen/Core>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "boxanneal/band.hpp"
#include "boxanneal/potential.hpp"

namespace boxanneal {

/// Truncated kinetic-energy (particle-in-a-box) basis phi_0 .. phi_{n_dim-1}.
struct BasisSpec {
  int n_dim = 400;
  double L = 1.0;
  double mass = 1.0;
  double hbar = 1.0;
};

void validate(const BasisSpec& basis);

/// K_n = (n+1)^2 pi^2 hbar^2 / (2 m L^2).
double kinetic_eigenvalue(int n, const BasisSpec& basis);

/// phi_n(x) = sqrt(2/L) sin((n+1) pi x / L); throws outside [0, L].
double basis_function(int n, double x, const BasisSpec& basis);

/// Exact overlap integral of phi_n phi_m cos(l pi x / L) over the box, for l >= 2:
///   1/2 (delta_{n-m+l} + delta_{n-m-l} - delta_{n+m+2-l}).
double cosine_matrix_element(int n, int m, int l);

/// <phi_n | x | phi_m>.
double position_matrix_element(int n, int m, const BasisSpec& basis);

/// <phi_n | (x - center)^2 | phi_m>.
double quadratic_matrix_element(int n, int m, double center, const BasisSpec& basis);

struct CosineTerm {
  int l = 2;            // weight * cos(l pi x / L)
  double weight = 0.0;
};

struct QuadraticTerm {
  double center = 0.0;  // weight * (x - center)^2
  double weight = 0.0;
};

/// A potential written as a constant plus cosine harmonics of the box plus an
/// optional parabola. Every landscape used here is mirror symmetric about L/2,
/// which makes the operator block diagonal in the parity of n.
struct PotentialExpansion {
  double constant = 0.0;
  std::vector<CosineTerm> cosines;
  std::optional<QuadraticTerm> quadratic;
};

PotentialExpansion expand(const BoxPotential& p);

/// Rastrigin landscape recentred at L_big / 2 inside a box of width L_big.
/// Requires 2 L_big / w0 to be an integer >= 2.
PotentialExpansion expand_embedded(const RastriginPotential& p, double L_big);

enum class Parity { even = 0, odd = 1 };

/// Potential operator in the sine basis, stored as two parity blocks in band
/// form. Index n maps to block parity n % 2, block row n / 2.
class PotentialMatrix {
 public:
  PotentialMatrix(const PotentialExpansion& v, const BasisSpec& basis);

  const BasisSpec& basis() const { return basis_; }
  int n_dim() const { return basis_.n_dim; }
  /// Bandwidth of the full (unsplit) matrix.
  int bandwidth() const { return bandwidth_; }
  const SymmetricBandMatrix<double>& block(Parity p) const { return blocks_[static_cast<int>(p)]; }

  double operator()(int n, int m) const;
  double norm_inf() const;

 private:
  BasisSpec basis_;
  int bandwidth_ = 0;
  SymmetricBandMatrix<double> blocks_[2];
};

std::shared_ptr<const PotentialMatrix> make_potential_matrix(const BoxPotential& p, const BasisSpec& basis);

/// kinetic_scale * diag(K_n) + potential_scale * V.
/// H(s) uses (1/s, 1); the convex combination uses (1 - tau, tau).
/// Immutable; the potential operator is shared between matrices.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(std::shared_ptr<const PotentialMatrix> v, double kinetic_scale, double potential_scale);

  const BasisSpec& basis() const { return v_->basis(); }
  int n_dim() const { return v_->n_dim(); }
  double kinetic_scale() const { return kinetic_scale_; }
  double potential_scale() const { return potential_scale_; }
  const PotentialMatrix& potential() const { return *v_; }
  const std::shared_ptr<const PotentialMatrix>& potential_ptr() const { return v_; }

  double operator()(int n, int m) const;

  SymmetricBandMatrix<double> block(Parity p) const;
  Eigen::MatrixXd dense() const;
  double norm_inf() const;

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> y(n_dim());
    for (int p = 0; p < 2; ++p) {
      const Parity par = static_cast<Parity>(p);
      const int m = static_cast<int>(v_->block(par).size());
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> xb(m);
      for (int i = 0; i < m; ++i) xb(i) = x(2 * i + p);
      const auto yb = band_multiply(block(par), xb);
      for (int i = 0; i < m; ++i) y(2 * i + p) = yb(i);
    }
    return y;
  }

 private:
  std::shared_ptr<const PotentialMatrix> v_;
  double kinetic_scale_;
  double potential_scale_;
};

/// H(s) = (1/s) p^2/2m + V; throws DomainError for s <= 0.
HamiltonianMatrix build_hamiltonian(const BoxPotential& p, double s, const BasisSpec& basis);
HamiltonianMatrix build_hamiltonian(std::shared_ptr<const PotentialMatrix> v, double s);

/// (1 - tau) p^2/2m + tau V; throws DomainError for tau outside [0, 1].
HamiltonianMatrix build_convex_combination_hamiltonian(const BoxPotential& p, double tau, const BasisSpec& basis);

/// Coefficients c_n of a normalized wave function in the sine basis.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-8;

  /// Throws DomainError if the norm differs from one by more than kNormTolerance.
  StateVector(Eigen::VectorXcd coefficients, BasisSpec basis);
  static StateVector normalized(Eigen::VectorXcd coefficients, BasisSpec basis);

  const Eigen::VectorXcd& coefficients() const { return c_; }
  const BasisSpec& basis() const { return basis_; }
  double norm() const { return c_.norm(); }

 private:
  Eigen::VectorXcd c_;
  BasisSpec basis_;
};

/// psi(x) = sum_n c_n phi_n(x) at each grid point (grid points inside [0, L]).
Eigen::VectorXcd to_position(const StateVector& state, std::span<const double> grid);
Eigen::VectorXcd to_position(const Eigen::Ref<const Eigen::VectorXcd>& coefficients, const BasisSpec& basis,
                             std::span<const double> grid);

/// Evenly spaced grid of `count` points covering [0, L] inclusive.
std::vector<double> uniform_grid(double L, int count);

/// Probability of finding the particle inside [lo, hi] (composite Simpson).
double window_probability(const Eigen::Ref<const Eigen::VectorXcd>& coefficients, const BasisSpec& basis, double lo,
                          double hi, int points = 513);

}  // namespace boxanneal
