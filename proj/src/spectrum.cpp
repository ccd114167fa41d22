#include "boxanneal/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "boxanneal/errors.hpp"
#include "boxanneal/parallel.hpp"

namespace boxanneal {

namespace {

// Levels past k are computed so that a degenerate block straddling the cut
// is canonicalized as a whole before truncation.
constexpr int kLookahead = 2;

struct SectorSolution {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // block coordinates
};

SectorSolution solve_sector(const HamiltonianMatrix& h, Parity sector, int k, bool with_vectors) {
  const SymmetricBandMatrix<double> blk = h.block(sector);
  const int m = static_cast<int>(blk.size());
  k = std::min(k, m);
  SectorSolution out;
  if (k <= 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      blk.to_dense(), with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("symmetric eigensolver did not converge (block size " + std::to_string(m) + ")");
  out.energies = es.eigenvalues().head(k);
  if (!with_vectors) return out;
  out.vectors = es.eigenvectors().leftCols(k);
  const double scale = blk.norm_inf();
  for (int j = 0; j < k; ++j) {
    const double r = (band_multiply(blk, out.vectors.col(j)) - out.energies(j) * out.vectors.col(j)).norm();
    if (r >= kResidualTolerance * scale) {
      std::ostringstream msg;
      msg << "eigenpair " << j << " residual " << r << " exceeds " << kResidualTolerance << " * ||H|| = "
          << kResidualTolerance * scale;
      throw ConvergenceError(msg.str());
    }
  }
  return out;
}

void embed_column(const Eigen::VectorXd& block_vector, Parity sector, Eigen::Ref<Eigen::VectorXd> full) {
  full.setZero();
  const int p = static_cast<int>(sector);
  for (Eigen::Index i = 0; i < block_vector.size(); ++i) full(2 * i + p) = block_vector(i);
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

Eigen::MatrixXd position_matrix(const BasisSpec& basis) {
  const int n = basis.n_dim;
  Eigen::MatrixXd x(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) x(i, j) = x(j, i) = position_matrix_element(i, j, basis);
  return x;
}

bool degenerate(double e1, double e2) {
  const double scale = std::max({std::abs(e1), std::abs(e2), 1e-300});
  return std::abs(e2 - e1) <= kDegeneracyTolerance * scale;
}

// Rotates each degenerate block onto eigenvectors of x, ordered by <x>.
void localize_degenerate_blocks(Eigenpairs& out, const BasisSpec& basis) {
  const int k = static_cast<int>(out.energies.size());
  std::optional<Eigen::MatrixXd> x;
  for (int lo = 0; lo < k;) {
    int hi = lo + 1;
    while (hi < k && degenerate(out.energies(hi - 1), out.energies(hi))) ++hi;
    if (hi - lo > 1) {
      if (!x) x = position_matrix(basis);
      const Eigen::MatrixXd v = out.vectors.middleCols(lo, hi - lo);
      const Eigen::MatrixXd m = v.transpose() * (*x) * v;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      out.vectors.middleCols(lo, hi - lo) = v * es.eigenvectors();
    }
    lo = hi;
  }
}

}  // namespace

Eigenpairs eigensolve(const HamiltonianMatrix& h, Parity sector, int k, bool with_vectors) {
  const int m = static_cast<int>(h.potential().block(sector).size());
  if (k < 1 || k > m) throw DomainError("level count k must lie in [1, sector size]");
  const SectorSolution sol = solve_sector(h, sector, k, with_vectors);
  Eigenpairs out;
  out.energies = sol.energies;
  if (with_vectors) {
    out.vectors.resize(h.n_dim(), k);
    for (int j = 0; j < k; ++j) {
      embed_column(sol.vectors.col(j), sector, out.vectors.col(j));
      fix_sign(out.vectors.col(j));
    }
  }
  return out;
}

Eigenpairs eigensolve(const HamiltonianMatrix& h, int k, bool with_vectors) {
  const int n = h.n_dim();
  if (k < 1 || k > n) throw DomainError("level count k must lie in [1, n_dim]");
  const int want = std::min(n, k + kLookahead);
  const SectorSolution even = solve_sector(h, Parity::even, want, with_vectors);
  const SectorSolution odd = solve_sector(h, Parity::odd, want, with_vectors);

  struct Entry {
    double e;
    Parity sector;
    Eigen::Index column;
  };
  std::vector<Entry> all;
  for (Eigen::Index j = 0; j < even.energies.size(); ++j) all.push_back({even.energies(j), Parity::even, j});
  for (Eigen::Index j = 0; j < odd.energies.size(); ++j) all.push_back({odd.energies(j), Parity::odd, j});
  std::stable_sort(all.begin(), all.end(), [](const Entry& l, const Entry& r) { return l.e < r.e; });
  all.resize(want);

  Eigenpairs out;
  out.energies.resize(want);
  for (int j = 0; j < want; ++j) out.energies(j) = all[j].e;
  if (with_vectors) {
    out.vectors.resize(n, want);
    for (int j = 0; j < want; ++j) {
      const SectorSolution& src = all[j].sector == Parity::even ? even : odd;
      embed_column(src.vectors.col(all[j].column), all[j].sector, out.vectors.col(j));
    }
    localize_degenerate_blocks(out, h.basis());
    for (int j = 0; j < want; ++j) fix_sign(out.vectors.col(j));
    out.vectors.conservativeResize(Eigen::NoChange, k);
  }
  out.energies.conservativeResize(k);
  return out;
}

std::vector<double> log_grid(double log_min, double log_max, int count) {
  if (count < 1) throw DomainError("grid needs at least one point");
  if (count > 1 && !(log_max > log_min)) throw DomainError("grid range must be increasing");
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) {
    const double e = count == 1 ? log_min : log_min + (log_max - log_min) * i / (count - 1);
    s[i] = std::pow(10.0, e);
  }
  return s;
}

SpectrumSweep sweep(const BoxPotential& p, std::span<const double> s_grid, int k, const BasisSpec& basis,
                    const SweepOptions& options) {
  return sweep(make_potential_matrix(p, basis), s_grid, k, options);
}

SpectrumSweep sweep(std::shared_ptr<const PotentialMatrix> v, std::span<const double> s_grid, int k,
                    const SweepOptions& options) {
  if (s_grid.empty()) throw DomainError("s grid must not be empty");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > 0.0)) throw DomainError("s grid values must be positive");
    if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw DomainError("s grid must be strictly increasing");
  }
  if (k < 1 || k > v->n_dim()) throw DomainError("level count k must lie in [1, n_dim]");

  const int count = static_cast<int>(s_grid.size());
  SpectrumSweep sw;
  sw.s_grid.assign(s_grid.begin(), s_grid.end());
  sw.levels.resize(count, k);
  sw.potential = v;
  if (options.with_vectors) sw.eigenvectors.resize(count);

  parallel_for(count, options.jobs, [&](int i) {
    Eigenpairs e = eigensolve(build_hamiltonian(v, sw.s_grid[i]), k, options.with_vectors);
    sw.levels.row(i) = e.energies.transpose();
    if (options.with_vectors) sw.eigenvectors[i] = std::move(e.vectors);
  });

  if (options.with_vectors)
    for (int i = 1; i < count; ++i)
      for (int n = 0; n < k; ++n)
        if (sw.eigenvectors[i].col(n).dot(sw.eigenvectors[i - 1].col(n)) < 0.0)
          sw.eigenvectors[i].col(n) *= -1.0;
  return sw;
}

std::vector<double> gaps(const SpectrumSweep& sw, int n) {
  if (n < 0 || n >= sw.level_count()) throw DomainError("gap index outside the computed levels");
  std::vector<double> d(sw.s_grid.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(0.0, sw.levels(i, n) - sw.levels(i, 0));
  return d;
}

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::closure: return "closure";
    case FeatureKind::flat_plateau: return "flat_plateau";
    case FeatureKind::merge: return "merge";
  }
  return "unknown";
}

namespace {

double gap_at(const SpectrumSweep& sw, int n, double log_s) {
  if (!sw.potential) {
    // stored levels only: interpolate linearly in log s
    auto d = [&](std::size_t i) { return sw.levels(i, n) - sw.levels(i, 0); };
    std::size_t i = 1;
    while (i + 1 < sw.s_grid.size() && std::log10(sw.s_grid[i]) < log_s) ++i;
    const double x0 = std::log10(sw.s_grid[i - 1]), x1 = std::log10(sw.s_grid[i]);
    const double t = (log_s - x0) / (x1 - x0);
    return std::max(0.0, (1.0 - t) * d(i - 1) + t * d(i));
  }
  const Eigenpairs e = eigensolve(build_hamiltonian(sw.potential, std::pow(10.0, log_s)), n + 1, false);
  return std::max(0.0, e.energies(n) - e.energies(0));
}

constexpr int kRefineIterations = 40;

}  // namespace

std::optional<GapFeature> detect_gap_closure(const SpectrumSweep& sw, int n, double tol) {
  if (!(tol > 0.0)) throw DomainError("closure tolerance must be positive");
  const std::vector<double> d = gaps(sw, n);
  const int count = static_cast<int>(d.size());

  std::optional<GapFeature> best;
  auto offer = [&](double log_s, double value) {
    const double s = std::pow(10.0, log_s);
    if (!best || s < best->s_lo) best = GapFeature{FeatureKind::closure, n, s, s, value};
  };

  int first = count;
  for (int i = 0; i < count; ++i)
    if (d[i] < tol) {
      first = i;
      break;
    }
  if (first == 0) {
    offer(std::log10(sw.s_grid[0]), d[0]);
  } else if (first < count) {
    double lo = std::log10(sw.s_grid[first - 1]);
    double hi = std::log10(sw.s_grid[first]);
    double v_hi = d[first];
    for (int it = 0; it < kRefineIterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double v = gap_at(sw, n, mid);
      if (v < tol) {
        hi = mid;
        v_hi = v;
      } else {
        lo = mid;
      }
    }
    offer(hi, v_hi);
  }

  // Interior local minima before the first sub-tolerance grid point.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 1; i + 1 < std::min(first, count); ++i) {
    if (!(d[i] <= d[i - 1] && d[i] <= d[i + 1])) continue;
    double a = std::log10(sw.s_grid[i - 1]);
    double b = std::log10(sw.s_grid[i + 1]);
    double c = b - inv_phi * (b - a);
    double e = a + inv_phi * (b - a);
    double fc = gap_at(sw, n, c);
    double fe = gap_at(sw, n, e);
    for (int it = 0; it < kRefineIterations; ++it) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - inv_phi * (b - a);
        fc = gap_at(sw, n, c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + inv_phi * (b - a);
        fe = gap_at(sw, n, e);
      }
    }
    const double x = fc < fe ? c : e;
    const double f = std::min(fc, fe);
    if (f < tol) {
      offer(x, f);
      break;  // later minima lie at larger s
    }
  }
  return best;
}

std::vector<GapFeature> detect_flat_gaps(const SpectrumSweep& sw, int n, double slope_tol, double closure_tol) {
  if (sw.s_grid.size() < 3) throw DomainError("flat-gap detection needs at least three grid points");
  if (!(slope_tol > 0.0)) throw DomainError("slope tolerance must be positive");
  const std::vector<double> d = gaps(sw, n);
  const int count = static_cast<int>(d.size());
  std::vector<double> x(count), y(count);
  for (int i = 0; i < count; ++i) {
    x[i] = std::log10(sw.s_grid[i]);
    y[i] = std::log(std::max(d[i], 1e-300));
  }
  std::vector<bool> flat(count);
  for (int i = 0; i < count; ++i) {
    const int l = std::max(i - 1, 0);
    const int r = std::min(i + 1, count - 1);
    const double slope = (y[r] - y[l]) / (x[r] - x[l]);
    flat[i] = std::abs(slope) < slope_tol && d[i] > closure_tol && d[l] > closure_tol && d[r] > closure_tol;
  }
  std::vector<GapFeature> out;
  for (int i = 0; i < count;) {
    if (!flat[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < count && flat[j + 1]) ++j;
    if (j > i) {
      std::vector<double> run(d.begin() + i, d.begin() + j + 1);
      std::sort(run.begin(), run.end());
      const std::size_t h = run.size() / 2;
      const double median = run.size() % 2 ? run[h] : 0.5 * (run[h - 1] + run[h]);
      out.push_back({FeatureKind::flat_plateau, n, sw.s_grid[i], sw.s_grid[j], median});
    }
    i = j + 1;
  }
  return out;
}

int degeneracy_count(const SpectrumSweep& sw, int i, double tol) {
  if (i < 0 || i >= static_cast<int>(sw.s_grid.size())) throw DomainError("grid index out of range");
  int c = 0;
  for (int n = 0; n < sw.level_count(); ++n)
    if (sw.levels(i, n) - sw.levels(i, 0) < tol) ++c;
  return c;
}

double mirrored_window_probability(const Eigen::Ref<const Eigen::VectorXcd>& c, const BasisSpec& basis, double lo,
                                   double hi) {
  return window_probability(c, basis, lo, hi) + window_probability(c, basis, basis.L - hi, basis.L - lo);
}

std::optional<int> identify_level(const Eigenpairs& pairs, const BoxPotential& p, const BasisSpec& basis,
                                  WellKind kind, double threshold) {
  if (pairs.vectors.cols() != pairs.energies.size())
    throw DomainError("level identification needs eigenvectors");
  const double w = p.L / p.mu;
  const double lo = kind == WellKind::wall ? 0.0 : w;
  const double hi = kind == WellKind::wall ? w : 3.0 * w;
  for (Eigen::Index j = 0; j < pairs.vectors.cols(); ++j) {
    const Eigen::VectorXcd c = pairs.vectors.col(j).cast<std::complex<double>>();
    if (mirrored_window_probability(c, basis, lo, hi) > threshold) return static_cast<int>(j);
  }
  return std::nullopt;
}

}  // namespace boxanneal
