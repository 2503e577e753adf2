#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace curvspec::linalg {

/// Column block of vectors.
using Block = Eigen::MatrixXd;

/// Symmetric generalized problem K x = lambda M x with M positive definite,
/// described by its actions. `solve_shifted` must apply (K - shift M)^{-1}
/// in place, for a shift strictly below the spectrum. An empty apply_mass
/// means M = I.
struct GeneralizedProblem {
  Eigen::Index dim = 0;
  std::function<void(const Block&, Block&)> apply_stiffness;
  std::function<void(const Block&, Block&)> apply_mass;
  std::function<void(Block&)> solve_shifted;
  double stiffness_norm = 1.0; ///< estimate of ||K||, scales the residual test
  double mass_norm = 1.0;
};

struct SubspaceOptions {
  int wanted = 1;
  int guard = 4;        ///< extra block columns that speed up convergence
  int max_iter = 4000;
  double tol = 1e-13;   ///< relative residual ||Kx - lMx|| / ((||K|| + |l| ||M||) ||x||)
  std::uint64_t seed = 0x5eed5eedULL;
};

struct EigenPairs {
  Eigen::VectorXd values; ///< ascending, size `wanted`
  Block vectors;          ///< M-orthonormal columns
  int iterations = 0;
  double max_residual = 0.0;
};

/// Lowest eigenpairs by shift-and-invert subspace iteration with a
/// Rayleigh-Ritz step per sweep. `start`, when given, seeds the block (warm
/// starts in optimization loops). Throws ConvergenceError after max_iter.
EigenPairs lowest_eigenpairs(const GeneralizedProblem& problem, const SubspaceOptions& options,
                             const Block* start = nullptr);

/// Smallest eigenvalue of the symmetric tridiagonal matrix (diag, off) by
/// Sturm-count bisection to full precision.
double lowest_tridiagonal_eigenvalue(std::span<const double> diag, std::span<const double> off);

/// Lowest eigenvalue of -(w u')' = lambda w u on (0, d) with u(0) = u(d) = 0,
/// three-point scheme with w at faces for the flux and at nodes for the mass.
/// Throws GeometryError if w is not positive on the grid.
double weighted_dirichlet_ground(const std::function<double(double)>& weight, double d,
                                 std::size_t nr);

} // namespace curvspec::linalg
