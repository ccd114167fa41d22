#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxanneal/hamiltonian.hpp"
#include "boxanneal/potential.hpp"

namespace boxanneal {

/// Lowest eigenpairs of a Hamiltonian. `vectors` is n_dim x k (empty when
/// only energies were requested); column j belongs to energies(j).
struct Eigenpairs {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
};

/// Relative spacing below which two levels count as one degenerate block. Tunnelling
/// splittings between deep wells fall far below this, so such blocks are localized.
inline constexpr double kDegeneracyTolerance = 1e-8;
/// Residual certificate ||H v - E v|| < kResidualTolerance * ||H||.
inline constexpr double kResidualTolerance = 1e-10;

/// Lowest k eigenpairs, energies ascending. Each parity block is solved
/// densely and the two sets merged. Vectors are unit norm with the
/// largest-magnitude coefficient positive; vectors inside a degenerate block
/// are rotated to eigenvectors of the position operator so each one sits in
/// a single well. Throws DomainError for k outside [1, n_dim] and
/// ConvergenceError when a residual certificate fails.
Eigenpairs eigensolve(const HamiltonianMatrix& h, int k, bool with_vectors = true);

/// Same restricted to one parity sector; vectors are returned in full
/// n_dim coordinates with zeros in the other sector.
Eigenpairs eigensolve(const HamiltonianMatrix& h, Parity sector, int k, bool with_vectors = true);

/// count points with log10 s evenly spaced on [log_min, log_max].
std::vector<double> log_grid(double log_min, double log_max, int count);

struct SweepOptions {
  bool with_vectors = false;
  int jobs = 1;
};

/// E_n(s) on a grid of s values. levels(i, n) = E_n(s_grid[i]).
struct SpectrumSweep {
  std::vector<double> s_grid;
  Eigen::MatrixXd levels;
  std::vector<Eigen::MatrixXd> eigenvectors;  // one n_dim x k matrix per grid point, if requested
  std::shared_ptr<const PotentialMatrix> potential;

  int level_count() const { return static_cast<int>(levels.cols()); }
};

/// Eigensolve at every grid point (in parallel); eigenvector signs are then
/// matched to the previous grid point in a sequential pass.
SpectrumSweep sweep(const BoxPotential& p, std::span<const double> s_grid, int k, const BasisSpec& basis,
                    const SweepOptions& options = {});
SpectrumSweep sweep(std::shared_ptr<const PotentialMatrix> v, std::span<const double> s_grid, int k,
                    const SweepOptions& options = {});

/// Delta_n(s) = E_n(s) - E_0(s) at every grid point.
std::vector<double> gaps(const SpectrumSweep& sw, int n);

enum class FeatureKind { closure, flat_plateau, merge };
std::string to_string(FeatureKind kind);

struct GapFeature {
  FeatureKind kind = FeatureKind::closure;
  int level = 0;   // the gap Delta_level = E_level - E_0
  double s_lo = 0.0;
  double s_hi = 0.0;  // equal to s_lo for point features
  double value = 0.0;
};

/// Smallest s at which Delta_n drops below tol. Two mechanisms are searched:
/// the first grid point below tol (bracket refined by bisection in log s)
/// and local minima of Delta_n on the grid (refined by golden-section search
/// in log s), which catches level crossings narrower than the grid spacing.
/// Both refinements run 40 iterations. A sweep without a potential operator
/// is refined on the linear interpolant of its stored levels.
std::optional<GapFeature> detect_gap_closure(const SpectrumSweep& sw, int n, double tol);

/// Maximal runs of grid points where the gap is flat in the sense
/// |d ln Delta_n / d log10 s| < slope_tol and Delta_n > closure_tol.
/// Each run of at least two points is reported with its median gap.
std::vector<GapFeature> detect_flat_gaps(const SpectrumSweep& sw, int n, double slope_tol,
                                         double closure_tol = 1e-6);

/// Number of levels within tol of E_0 at grid point i (E_0 included).
int degeneracy_count(const SpectrumSweep& sw, int i, double tol);

/// Probability that the state with coefficients c sits in one of the two
/// mirror windows [lo, hi] and [L - hi, L - lo].
double mirrored_window_probability(const Eigen::Ref<const Eigen::VectorXcd>& c, const BasisSpec& basis, double lo,
                                   double hi);

enum class WellKind { wall, adjacent };

/// Lowest level among `pairs` whose density is concentrated (probability
/// above `threshold`) in the wells of the given kind: the wall wells
/// [0, L/mu] and mirror, or the adjacent wells [L/mu, 3L/mu] and mirror.
std::optional<int> identify_level(const Eigenpairs& pairs, const BoxPotential& p, const BasisSpec& basis,
                                  WellKind kind, double threshold = 0.9);

}  // namespace boxanneal
