#include "curvspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "curvspec/errors.hpp"

namespace curvspec::linalg {

namespace {

Block initial_block(Eigen::Index dim, Eigen::Index columns, std::uint64_t seed,
                    const Block* start) {
  Block x(dim, columns);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (Eigen::Index c = 0; c < columns; ++c)
    for (Eigen::Index i = 0; i < dim; ++i) x(i, c) = unif(rng);
  // A positive column overlaps every Perron ground state.
  x.col(0).setOnes();
  if (start != nullptr && start->rows() == dim) {
    const Eigen::Index keep = std::min(columns, start->cols());
    x.leftCols(keep) = start->leftCols(keep);
  }
  return x;
}

void apply_mass(const GeneralizedProblem& problem, const Block& x, Block& y) {
  if (problem.apply_mass)
    problem.apply_mass(x, y);
  else
    y = x;
}

} // namespace

EigenPairs lowest_eigenpairs(const GeneralizedProblem& problem, const SubspaceOptions& options,
                             const Block* start) {
  const Eigen::Index dim = problem.dim;
  if (options.wanted < 1 || dim < options.wanted)
    throw ParameterError(fmt::format("cannot extract {} eigenpairs from dimension {}",
                                     options.wanted, dim));
  const Eigen::Index columns =
      std::min<Eigen::Index>(dim, options.wanted + std::max(options.guard, 0));

  Block x = initial_block(dim, columns, options.seed, start);
  Block y(dim, columns), kq(dim, columns), mq(dim, columns);
  Eigen::VectorXd previous = Eigen::VectorXd::Constant(options.wanted,
                                                       std::numeric_limits<double>::infinity());
  int stagnant = 0;
  double worst = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    apply_mass(problem, x, y);
    problem.solve_shifted(y);
    if (!y.allFinite()) throw NumericalError("shifted solve produced non-finite values");

    Eigen::HouseholderQR<Block> qr(y);
    const Block q = qr.householderQ() * Block::Identity(dim, columns);

    problem.apply_stiffness(q, kq);
    apply_mass(problem, q, mq);
    Eigen::MatrixXd kr = q.transpose() * kq;
    Eigen::MatrixXd mr = q.transpose() * mq;
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr);
    if (ritz.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
    const Eigen::VectorXd theta = ritz.eigenvalues();
    const Eigen::MatrixXd v = ritz.eigenvectors();

    x = q * v;
    const Block kx = kq * v;
    const Block mx = mq * v;

    worst = 0.0;
    for (int j = 0; j < options.wanted; ++j) {
      const double res = (kx.col(j) - theta(j) * mx.col(j)).norm();
      const double scale =
          (problem.stiffness_norm + std::abs(theta(j)) * problem.mass_norm) * x.col(j).norm();
      worst = std::max(worst, res / scale);
    }

    const Eigen::VectorXd current = theta.head(options.wanted);
    const double change = ((current - previous).cwiseAbs().array() /
                           (current.cwiseAbs().array() + 1.0))
                              .maxCoeff();
    previous = current;
    stagnant = (change <= 4.0 * std::numeric_limits<double>::epsilon() &&
                worst <= 1e3 * options.tol)
                   ? stagnant + 1
                   : 0;

    if (worst <= options.tol || stagnant >= 3) {
      EigenPairs out;
      out.values = current;
      out.vectors = x.leftCols(options.wanted);
      out.iterations = iter;
      out.max_residual = worst;
      return out;
    }
  }
  throw ConvergenceError(fmt::format("subspace iteration did not converge in {} sweeps "
                                     "(relative residual {:.3e})",
                                     options.max_iter, worst),
                         worst);
}

double lowest_tridiagonal_eigenvalue(std::span<const double> diag, std::span<const double> off) {
  const std::size_t n = diag.size();
  if (n == 0) throw ParameterError("empty tridiagonal matrix");
  if (off.size() + 1 < n) throw ParameterError("tridiagonal off-diagonal too short");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(off[i - 1]);
    if (i + 1 < n) radius += std::abs(off[i]);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }

  const double tiny = std::numeric_limits<double>::min();
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
      if (q == 0.0) q = tiny;
      q = diag[i] - x - off[i - 1] * off[i - 1] / q;
      if (q < 0.0) ++count;
    }
    return count;
  };

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double weighted_dirichlet_ground(const std::function<double(double)>& weight, double d,
                                 std::size_t nr) {
  if (!(d > 0.0)) throw ParameterError("interval length must be positive");
  if (nr < 3) throw ParameterError("need at least 3 intervals");
  const double h = d / static_cast<double>(nr);
  const std::size_t m = nr - 1;

  std::vector<double> face(nr), mass(m);
  for (std::size_t k = 0; k < nr; ++k) {
    face[k] = weight((static_cast<double>(k) + 0.5) * h);
    if (!(face[k] > 0.0))
      throw GeometryError(fmt::format("radial weight not positive at r = {}",
                                      (static_cast<double>(k) + 0.5) * h));
  }
  for (std::size_t j = 0; j < m; ++j) {
    mass[j] = weight(static_cast<double>(j + 1) * h) * h;
    if (!(mass[j] > 0.0))
      throw GeometryError(fmt::format("radial weight not positive at r = {}",
                                      static_cast<double>(j + 1) * h));
  }

  std::vector<double> diag(m), off(m > 0 ? m - 1 : 0);
  for (std::size_t j = 0; j < m; ++j) diag[j] = (face[j] + face[j + 1]) / h / mass[j];
  for (std::size_t j = 0; j + 1 < m; ++j)
    off[j] = -face[j + 1] / h / std::sqrt(mass[j] * mass[j + 1]);
  return lowest_tridiagonal_eigenvalue(diag, off);
}

} // namespace curvspec::linalg
