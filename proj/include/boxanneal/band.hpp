#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>

namespace boxanneal {

/// Symmetric (A = A^T, no conjugation) band matrix in lower band storage:
/// band()(d, j) holds A(j + d, j) for 0 <= d <= bandwidth.
/// Works for real symmetric and complex symmetric matrices alike.
template <typename Scalar>
class SymmetricBandMatrix {
 public:
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(Eigen::Index n, Eigen::Index bandwidth)
      : band_(Storage::Zero(std::min(bandwidth, std::max<Eigen::Index>(n - 1, 0)) + 1, n)) {}

  Eigen::Index size() const { return band_.cols(); }
  Eigen::Index bandwidth() const { return band_.rows() - 1; }

  Storage& band() { return band_; }
  const Storage& band() const { return band_; }

  auto diagonal() { return band_.row(0).transpose(); }
  auto diagonal() const { return band_.row(0).transpose(); }

  /// Element access; entries outside the band read as zero.
  Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    if (i < j) std::swap(i, j);
    const Eigen::Index d = i - j;
    return d <= bandwidth() ? band_(d, j) : Scalar(0);
  }

  /// Writes both A(i, j) and A(j, i); (i, j) must lie inside the band.
  void set(Eigen::Index i, Eigen::Index j, Scalar value) {
    if (i < j) std::swap(i, j);
    assert(i - j <= bandwidth());
    band_(i - j, j) = value;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index d = 0; d <= bandwidth() && j + d < n; ++d) {
        out(j + d, j) = band_(d, j);
        out(j, j + d) = band_(d, j);
      }
    return out;
  }

  /// Infinity norm, an upper bound on the spectral radius of a symmetric matrix.
  double norm_inf() const {
    const Eigen::Index n = size();
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index d = 0; d <= bandwidth() && j + d < n; ++d) {
        const double v = std::abs(band_(d, j));
        rows(j + d) += v;
        if (d > 0) rows(j) += v;
      }
    return n > 0 ? rows.maxCoeff() : 0.0;
  }

 private:
  Storage band_;
};

/// y = A x for a symmetric band matrix; x may be real or complex.
template <typename Scalar, typename Derived>
auto band_multiply(const SymmetricBandMatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  using Out = typename Eigen::ScalarBinaryOpTraits<Scalar, typename Derived::Scalar>::ReturnType;
  const Eigen::Index n = a.size();
  const Eigen::Index bw = a.bandwidth();
  const auto& b = a.band();
  Eigen::Matrix<Out, Eigen::Dynamic, 1> y(n);
  for (Eigen::Index j = 0; j < n; ++j) y(j) = b(0, j) * x(j);
  for (Eigen::Index d = 1; d <= bw; ++d)
    for (Eigen::Index j = 0; j + d < n; ++j) {
      y(j + d) += b(d, j) * x(j);
      y(j) += b(d, j) * x(j + d);
    }
  return y;
}

/// In-place A = L D L^T without pivoting. On return the band holds D on the
/// diagonal and the unit-lower factor L below it. Stable for real SPD
/// matrices and for complex symmetric ones whose real or imaginary part is
/// definite, e.g. the Cayley operator I + i tau H with H >= 0. Returns false
/// on a zero pivot.
template <typename Scalar>
bool band_ldlt_factor(SymmetricBandMatrix<Scalar>& a) {
  const Eigen::Index n = a.size();
  const Eigen::Index bw = a.bandwidth();
  auto& b = a.band();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(bw + 1);  // w(k) = L(j, j-k) * D(j-k)
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index kmax = std::min(bw, j);
    Scalar djj = b(0, j);
    for (Eigen::Index k = 1; k <= kmax; ++k) {
      const Scalar l = b(k, j - k);
      w(k) = l * b(0, j - k);
      djj -= l * w(k);
    }
    if (djj == Scalar(0)) return false;
    b(0, j) = djj;
    // Column j of L, row j + d.
    for (Eigen::Index d = 1; d <= bw && j + d < n; ++d) {
      Scalar v = b(d, j);
      // L(j + d, j - k) lies in the band only for k <= bw - d
      const Eigen::Index km = std::min(kmax, bw - d);
      for (Eigen::Index k = 1; k <= km; ++k) v -= b(d + k, j - k) * w(k);
      b(d, j) = v / djj;
    }
  }
  return true;
}

/// Solves A x = rhs in place given the output of band_ldlt_factor.
template <typename Scalar, typename Derived>
void band_ldlt_solve(const SymmetricBandMatrix<Scalar>& f, Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index n = f.size();
  const Eigen::Index bw = f.bandwidth();
  const auto& b = f.band();
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto xj = x(j);
    for (Eigen::Index d = 1; d <= bw && j + d < n; ++d) x(j + d) -= b(d, j) * xj;
  }
  for (Eigen::Index j = 0; j < n; ++j) x(j) /= b(0, j);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    auto acc = x(j);
    for (Eigen::Index d = 1; d <= bw && j + d < n; ++d) acc -= b(d, j) * x(j + d);
    x(j) = acc;
  }
}

}  // namespace boxanneal
