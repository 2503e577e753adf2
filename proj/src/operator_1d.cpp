#include "curvspec/operator_1d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "curvspec/csv.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/kernels.hpp"
#include "curvspec/linalg.hpp"

namespace curvspec {

namespace {

void finalize_ground_state(SpectrumResult& result, const Eigen::VectorXd& v) {
  const double h = 1.0 / static_cast<double>(result.n);
  double sum = v.sum();
  const double scale = (sum < 0.0 ? -1.0 : 1.0) / std::sqrt(h * v.squaredNorm());
  result.ground_state.resize(result.n);
  for (std::size_t i = 0; i < result.n; ++i)
    result.ground_state[i] = scale * v(static_cast<Eigen::Index>(i));
}

void check_request(std::size_t n, std::size_t k) {
  if (k < 1) throw ParameterError("need at least one eigenvalue");
  if (k + 1 > n) throw ParameterError(fmt::format("cannot request {} eigenvalues on {} nodes", k, n));
}

} // namespace

OperatorSpec::OperatorSpec(CurvatureProfile profile, double g)
    : profile_(std::move(profile)), g_(g) {
  if (std::abs(profile_.length() - 1.0) > 1e-12)
    throw ParameterError(fmt::format("operator needs a unit-length profile, got length {}",
                                     profile_.length()));
  if (!std::isfinite(g_)) throw ParameterError("coupling constant must be finite");
}

CurvatureProfile OperatorSpec::profile_on(std::size_t n) const { return profile_.resampled(n); }

std::vector<double> OperatorSpec::potential(std::size_t n) const {
  const auto kappa = profile_on(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = g_ * kappa[i] * kappa[i];
  return v;
}

SpectrumResult ground_state(const OperatorSpec& spec, std::size_t n, std::size_t k,
                            std::span<const double> initial_guess) {
  if (n < min_operator_nodes)
    throw ParameterError(fmt::format("operator grid needs N >= {}, got {}", min_operator_nodes, n));
  check_request(n, k);

  const auto potential = spec.potential(n);
  const double h = 1.0 / static_cast<double>(n);
  const double inv_h2 = 1.0 / (h * h);
  const auto [vmin, vmax] = std::minmax_element(potential.begin(), potential.end());
  // lambda_1 >= min V because the difference Laplacian is nonnegative.
  const double shift = *vmin - 1.0;

  std::vector<double> diag(n), off(n, -inv_h2);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * inv_h2 + potential[i] - shift;
  const kernels::CyclicTridiagonal shifted(std::move(diag), std::move(off));

  const auto dim = static_cast<Eigen::Index>(n);
  linalg::GeneralizedProblem problem;
  problem.dim = dim;
  problem.apply_stiffness = [&](const linalg::Block& x, linalg::Block& y) {
    y.resize(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      kernels::apply_periodic_schrodinger(potential, h, {x.col(c).data(), n},
                                          {y.col(c).data(), n});
  };
  problem.solve_shifted = [&](linalg::Block& b) {
    shifted.solve_columns({b.data(), static_cast<std::size_t>(b.size())},
                          static_cast<std::size_t>(b.cols()));
  };
  problem.stiffness_norm = 4.0 * inv_h2 + std::max(std::abs(*vmin), std::abs(*vmax));

  linalg::SubspaceOptions options;
  options.wanted = static_cast<int>(std::max<std::size_t>(k, 2));
  options.guard = 4;

  linalg::Block start;
  const linalg::Block* start_ptr = nullptr;
  if (initial_guess.size() == n) {
    start = Eigen::Map<const Eigen::VectorXd>(initial_guess.data(), dim);
    start_ptr = &start;
  }
  const auto pairs = linalg::lowest_eigenpairs(problem, options, start_ptr);

  SpectrumResult result;
  result.g = spec.coupling();
  result.n = n;
  result.eigenvalues.assign(pairs.values.data(), pairs.values.data() + k);
  result.next_eigenvalue = pairs.values(1);
  result.iterations = pairs.iterations;
  finalize_ground_state(result, pairs.vectors.col(0));
  return result;
}

SpectrumResult ground_state_dense(const OperatorSpec& spec, std::size_t n, std::size_t k) {
  if (n < CurvatureProfile::min_nodes)
    throw ParameterError(fmt::format("grid size {} too small", n));
  check_request(n, k);
  const auto potential = spec.potential(n);
  const double h = 1.0 / static_cast<double>(n);
  const double inv_h2 = 1.0 / (h * h);
  const auto dim = static_cast<Eigen::Index>(n);

  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    hmat(i, i) = 2.0 * inv_h2 + potential[static_cast<std::size_t>(i)];
    hmat(i, (i + 1) % dim) -= inv_h2;
    hmat((i + 1) % dim, i) -= inv_h2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hmat);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");

  SpectrumResult result;
  result.g = spec.coupling();
  result.n = n;
  result.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
  result.next_eigenvalue = solver.eigenvalues()(1);
  finalize_ground_state(result, solver.eigenvectors().col(0));
  return result;
}

double rayleigh_quotient(const OperatorSpec& spec, std::span<const double> zeta) {
  const std::size_t n = zeta.size();
  const double mass = grid::inner(zeta, zeta, 1.0);
  if (!(mass > 0.0)) throw ParameterError("Rayleigh quotient of a zero function");
  const auto potential = spec.potential(n);
  double potential_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) potential_term += potential[i] * zeta[i] * zeta[i];
  potential_term /= static_cast<double>(n);
  return (grid::dirichlet_energy(zeta, 1.0) + potential_term) / mass;
}

bool is_degenerate(const SpectrumResult& result) {
  return result.spectral_gap() < degeneracy_tolerance * std::max(1.0, std::abs(result.lambda1()));
}

Sensitivity<double> hf_gradient_g(const OperatorSpec& spec, const SpectrumResult& result) {
  const auto kappa = spec.profile_on(result.n);
  double sum = 0.0;
  for (std::size_t i = 0; i < result.n; ++i) {
    const double kp = kappa[i] * result.ground_state[i];
    sum += kp * kp;
  }
  return {sum / static_cast<double>(result.n), is_degenerate(result)};
}

Sensitivity<std::vector<double>> hf_gradient_kappa(const OperatorSpec& spec,
                                                   const SpectrumResult& result) {
  const auto kappa = spec.profile_on(result.n);
  std::vector<double> grad(result.n);
  for (std::size_t i = 0; i < result.n; ++i)
    grad[i] = 2.0 * spec.coupling() * kappa[i] * result.ground_state[i] * result.ground_state[i];
  return {std::move(grad), is_degenerate(result)};
}

nlohmann::json spectrum_to_json(const SpectrumResult& result) {
  return {{"g", result.g},
          {"N", result.n},
          {"eigenvalues", result.eigenvalues},
          {"ground_state", result.ground_state}};
}

void write_ground_state_csv(std::ostream& out, const SpectrumResult& result) {
  CsvWriter csv(out);
  csv.header({"s", "psi"});
  for (std::size_t i = 0; i < result.n; ++i)
    csv.field(grid::node(i, result.n, 1.0)).field(result.ground_state[i]).end_row();
}

} // namespace curvspec
