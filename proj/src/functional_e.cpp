#include "curvspec/functional_e.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "curvspec/csv.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/kernels.hpp"

namespace curvspec {

namespace {

double inverse_square_integral(std::span<const double> zeta) {
  double sum = 0.0;
  for (double z : zeta) sum += 1.0 / (z * z);
  return sum / static_cast<double>(zeta.size());
}

struct Stationarity {
  double energy = 0.0;
  double M = 0.0;
  double C = 0.0;
  std::vector<double> residual; // -zeta'' + M zeta^-3 - C zeta
};

Stationarity stationarity(std::span<const double> zeta, double g) {
  const std::size_t n = zeta.size();
  const double inv_sq = inverse_square_integral(zeta);
  Stationarity st;
  st.energy = grid::dirichlet_energy(zeta, 1.0) + 4.0 * pi * pi * g / inv_sq;
  st.M = 4.0 * pi * pi * g / (inv_sq * inv_sq);

  auto lap = grid::negative_laplacian(zeta, 1.0);
  for (std::size_t i = 0; i < n; ++i) lap[i] += st.M / (zeta[i] * zeta[i] * zeta[i]);
  st.C = grid::inner(zeta, lap, 1.0) / grid::inner(zeta, zeta, 1.0);
  st.residual = std::move(lap);
  for (std::size_t i = 0; i < n; ++i) st.residual[i] -= st.C * zeta[i];
  return st;
}

std::vector<double> density_from_log(std::span<const double> u) {
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::exp(u[i]);
  const double norm = grid::norm(w, 1.0);
  for (double& v : w) v /= norm;
  return w;
}

// Fourth-order first derivative; one-sided five-point stencils at the ends.
std::vector<double> derivative_fourth_order(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double c = 1.0 / (12.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) * c;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
  const std::size_t l = n - 1;
  d[l - 1] = (3.0 * f[l] + 10.0 * f[l - 1] - 18.0 * f[l - 2] + 6.0 * f[l - 3] - f[l - 4]) * c;
  d[l] = (25.0 * f[l] - 48.0 * f[l - 1] + 36.0 * f[l - 2] - 16.0 * f[l - 3] + 3.0 * f[l - 4]) * c;
  return d;
}

} // namespace

DensityProfile::DensityProfile(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.size() < CurvatureProfile::min_nodes)
    throw ParameterError(fmt::format("density grid needs at least {} nodes",
                                     CurvatureProfile::min_nodes));
  for (double v : samples_)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ParameterError("density samples must be finite and strictly positive");
}

DensityProfile DensityProfile::normalized(std::vector<double> samples) {
  DensityProfile p(std::move(samples));
  const double norm = std::sqrt(p.l2_norm_squared());
  for (double& v : p.samples_) v /= norm;
  return p;
}

DensityProfile DensityProfile::as_given(std::vector<double> samples) {
  return DensityProfile(std::move(samples));
}

double DensityProfile::min() const noexcept {
  return *std::min_element(samples_.begin(), samples_.end());
}

double DensityProfile::l2_norm_squared() const noexcept {
  return grid::inner(samples_, samples_, 1.0);
}

bool DensityProfile::is_normalized() const noexcept {
  return std::abs(l2_norm_squared() - 1.0) <= normalization_tolerance;
}

DensityProfile random_density(std::size_t n, std::uint64_t seed, int n_modes, double amplitude) {
  if (n_modes < 1) throw ParameterError("random density needs at least one mode");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(n, 0.0);
  for (int m = 1; m <= n_modes; ++m) {
    const double a = amplitude * normal(rng) / m;
    const double b = amplitude * normal(rng) / m;
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = two_pi * m * grid::node(i, n, 1.0);
      u[i] += a * std::cos(phase) + b * std::sin(phase);
    }
  }
  for (double& v : u) v = std::exp(v);
  return DensityProfile::normalized(std::move(u));
}

double evaluate_E(const DensityProfile& zeta, double g) {
  return grid::dirichlet_energy(zeta.samples(), 1.0) +
         4.0 * pi * pi * g / inverse_square_integral(zeta.samples());
}

MinimizationReport minimize_E(double g, const DensityProfile& init, double tol, int max_iter) {
  if (!(g > 0.0)) throw ParameterError(fmt::format("minimize_E needs g > 0, got {}", g));
  if (!(tol > 0.0) || max_iter < 0) throw ParameterError("invalid tolerance or iteration cap");

  constexpr double initial_step = 1.0;
  constexpr double shrink = 0.5;
  constexpr double armijo = 1e-4;
  constexpr double min_step = 1e-16;
  // Below this energy change the Armijo test is decided by rounding; accept
  // on a residual decrease instead.
  constexpr double energy_noise = 1e-12;
  // Preconditioner 2 (L + beta): the Hessian of E in u is dominated by 2L at
  // high wavenumbers; beta keeps the constant mode invertible.
  constexpr double beta = 1.0;

  const std::size_t n = init.size();
  const double h = 1.0 / static_cast<double>(n);
  const double inv_h2 = 1.0 / (h * h);
  const kernels::CyclicTridiagonal precond(std::vector<double>(n, 2.0 * (2.0 * inv_h2 + beta)),
                                           std::vector<double>(n, -2.0 * inv_h2));

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::log(init[i]);

  std::vector<double> zeta = density_from_log(u);
  Stationarity st = stationarity(zeta, g);
  double grad_norm = grid::norm(st.residual, 1.0);

  std::vector<TraceRow> trace;
  trace.push_back({0, st.energy, grad_norm});
  bool converged = grad_norm <= tol;
  int iter = 0;
  std::vector<double> grad(n), direction(n), trial(n);

  while (!converged && iter < max_iter) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) grad[i] = 2.0 * zeta[i] * st.residual[i];
    direction = grad;
    precond.solve_in_place(direction);
    for (double& v : direction) v = -v;
    const double slope = grid::inner(grad, direction, 1.0);
    if (!(slope < 0.0)) break;

    double step = initial_step;
    bool accepted = false;
    Stationarity next;
    std::vector<double> next_zeta;
    while (step >= min_step) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * direction[i];
      next_zeta = density_from_log(trial);
      next = stationarity(next_zeta, g);
      if (!std::isfinite(next.energy))
        throw NumericalError(fmt::format("non-finite energy in line search at iteration {}", iter));
      const bool sufficient = next.energy <= st.energy + armijo * step * slope;
      const bool within_noise = next.energy <= st.energy + energy_noise * std::abs(st.energy) &&
                                grid::norm(next.residual, 1.0) < grad_norm;
      if (sufficient || within_noise) {
        accepted = true;
        break;
      }
      step *= shrink;
    }
    if (!accepted) break;

    u = trial;
    zeta = std::move(next_zeta);
    st = std::move(next);
    grad_norm = grid::norm(st.residual, 1.0);
    trace.push_back({iter, st.energy, grad_norm});
    converged = grad_norm <= tol;
  }

  MinimizationReport report{DensityProfile::normalized(zeta), g, 0.0, 0.0, iter, converged,
                            std::move(trace)};
  report.energy = evaluate_E(report.minimizer, g);
  report.euler_residual = euler_residual(report.minimizer, g).residual_norm;
  return report;
}

DensityFloorResult density_floor_check(const DensityProfile& zeta, double g) {
  if (!zeta.is_normalized()) throw ParameterError("density floor bound needs an L2-normalized density");
  DensityFloorResult r;
  r.E = evaluate_E(zeta, g);
  r.min_zeta = zeta.min();
  r.applicable = r.E <= pi * pi;
  if (!r.applicable) return r;
  r.bound = 1.0 - std::sqrt(r.E) / pi;
  r.satisfied = r.min_zeta > r.bound;
  return r;
}

CurvatureProfile recover_kappa(const DensityProfile& zeta) {
  const double factor = two_pi / inverse_square_integral(zeta.samples());
  std::vector<double> kappa(zeta.size());
  for (std::size_t i = 0; i < zeta.size(); ++i) kappa[i] = factor / (zeta[i] * zeta[i]);
  return CurvatureProfile(std::move(kappa), 1.0);
}

EulerResidual euler_residual(const DensityProfile& zeta, double g) {
  const auto st = stationarity(zeta.samples(), g);
  return {grid::norm(st.residual, 1.0), st.M, st.C};
}

EulerData euler_data(const DensityProfile& zeta, double g) {
  const auto st = stationarity(zeta.samples(), g);
  const double cprime = grid::dirichlet_energy(zeta.samples(), 1.0) +
                        st.M * inverse_square_integral(zeta.samples()) +
                        st.C * zeta.l2_norm_squared();
  return {st.M, st.C, cprime};
}

DensityProfile explicit_solution(double M, double lambda, double s0, std::size_t n) {
  if (!(M > 0.0) || !(lambda > 0.0))
    throw ParameterError("explicit solution needs M > 0 and lambda > 0");
  if (M > lambda)
    throw ParameterError(fmt::format("explicit solution needs M <= lambda, got M = {}, "
                                     "lambda = {}",
                                     M, lambda));
  const double amplitude = std::sqrt(1.0 - M / lambda);
  const double omega = 2.0 * std::sqrt(lambda);
  std::vector<double> zeta(n);
  for (std::size_t i = 0; i < n; ++i)
    zeta[i] = std::sqrt(1.0 + amplitude * std::cos(omega * (grid::node(i, n, 1.0) - s0)));
  return DensityProfile::as_given(std::move(zeta));
}

double first_integral_residual(const DensityProfile& zeta, double M, double lambda) {
  const std::size_t n = zeta.size();
  const auto d = derivative_fourth_order(zeta.samples(), 1.0 / static_cast<double>(n));
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z2 = zeta[i] * zeta[i];
    const double lhs = z2 * d[i] * d[i];
    const double rhs = lambda - M - lambda * (z2 - 1.0) * (z2 - 1.0);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

nlohmann::json report_to_json(const MinimizationReport& report) {
  return {{"g", report.g},
          {"N", report.minimizer.size()},
          {"energy", report.energy},
          {"euler_residual", report.euler_residual},
          {"iterations", report.iterations},
          {"converged", report.converged},
          {"minimizer", std::vector<double>(report.minimizer.samples().begin(),
                                            report.minimizer.samples().end())}};
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  CsvWriter csv(out);
  csv.header({"iteration", "energy", "gradient_norm"});
  for (const auto& row : trace) csv.field(row.iteration).field(row.energy).field(row.gradient_norm).end_row();
}

} // namespace curvspec
