#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "curvspec/curve_geometry.hpp"

namespace curvspec {

/// Strictly positive periodic grid function zeta on the unit-length
/// midpoint grid.
///
/// Test densities are L2-normalized (`normalized`). The explicit Euler
/// solution family is sampled verbatim (`as_given`): it is generically not
/// periodic on [0, 1] and rescaling would break the first integral it
/// satisfies, so normalization is a queryable property rather than a hard
/// invariant.
class DensityProfile {
public:
  static constexpr double normalization_tolerance = 1e-12;

  static DensityProfile normalized(std::vector<double> samples);
  static DensityProfile as_given(std::vector<double> samples);

  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  double min() const noexcept;
  double l2_norm_squared() const noexcept;
  bool is_normalized() const noexcept;

private:
  explicit DensityProfile(std::vector<double> samples);
  std::vector<double> samples_;
};

/// Constants of the Euler-Lagrange equation -zeta'' + M / zeta^3 = C zeta and
/// its first integral zeta'^2 + M / zeta^2 + C zeta^2 = C'.
struct EulerData {
  double M = 0.0;
  double C = 0.0;
  double Cprime = 0.0;
};

struct EulerResidual {
  double residual_norm = 0.0; ///< L2 norm of -zeta'' + M/zeta^3 - C zeta
  double M = 0.0;
  double C = 0.0;             ///< Galerkin value making the residual orthogonal to zeta
};

struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  double gradient_norm = 0.0;
};

struct MinimizationReport {
  DensityProfile minimizer;
  double g = 0.0;
  double energy = 0.0;
  double euler_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;
};

struct DensityFloorResult {
  bool applicable = false; ///< false when E > pi^2 (hypothesis fails)
  double E = 0.0;
  double bound = 0.0;      ///< 1 - sqrt(E) / pi
  double min_zeta = 0.0;
  bool satisfied = false;
};

/// zeta proportional to exp(sum_{m <= n_modes} amplitude (a_m cos + b_m sin) / m),
/// a_m, b_m ~ N(0, 1) drawn from `seed`; L2-normalized.
DensityProfile random_density(std::size_t n, std::uint64_t seed, int n_modes = 4,
                              double amplitude = 0.5);

/// E(zeta) = int zeta'^2 + 4 pi^2 g / int zeta^-2, face differences and
/// midpoint quadrature.
double evaluate_E(const DensityProfile& zeta, double g);

/// Descent on u with zeta = exp(u) / ||exp(u)||; H1-preconditioned gradient,
/// Armijo backtracking from step 1 with factor 1/2. Stops when the
/// projected gradient (the Euler residual) drops to `tol`.
MinimizationReport minimize_E(double g, const DensityProfile& init, double tol = 1e-8,
                              int max_iter = 5000);

DensityFloorResult density_floor_check(const DensityProfile& zeta, double g);

/// kappa = (2 pi / int zeta^-2) zeta^-2 on the unit-length grid.
CurvatureProfile recover_kappa(const DensityProfile& zeta);

EulerResidual euler_residual(const DensityProfile& zeta, double g);

/// M, Galerkin C, and C' = int (zeta'^2 + M zeta^-2 + C zeta^2).
EulerData euler_data(const DensityProfile& zeta, double g);

/// zeta^2 = 1 + sqrt(1 - M/lambda) cos(2 sqrt(lambda) (s - s0)), sampled as given.
DensityProfile explicit_solution(double M, double lambda, double s0, std::size_t n);

/// sup_i |zeta^2 zeta'^2 - (lambda - M - lambda (zeta^2 - 1)^2)| with
/// fourth-order differences (one-sided at the two ends, since the explicit
/// family is not periodic).
double first_integral_residual(const DensityProfile& zeta, double M, double lambda);

nlohmann::json report_to_json(const MinimizationReport& report);
/// Columns (iteration, energy, gradient_norm).
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

} // namespace curvspec
