#include "curvspec/curve_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "curvspec/csv.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/operator_1d.hpp"

namespace curvspec {

namespace {

using Coeffs = std::vector<double>;

// Columns cos(2 pi m s), sin(2 pi m s) for m = 1..n_modes on the unit grid.
std::vector<std::vector<double>> fourier_basis(int n_modes, std::size_t n) {
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(2 * n_modes),
                                         std::vector<double>(n));
  for (int k = 0; k < 2 * n_modes; ++k) {
    const double m = static_cast<double>(k / 2 + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = two_pi * m * grid::node(i, n, 1.0);
      basis[static_cast<std::size_t>(k)][i] = k % 2 == 0 ? std::cos(phase) : std::sin(phase);
    }
  }
  return basis;
}

Coeffs project(const std::vector<std::vector<double>>& basis, std::span<const double> f) {
  Coeffs c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) c[k] = grid::inner(basis[k], f, 1.0);
  return c;
}

double dot(const Coeffs& a, const Coeffs& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

struct Evaluation {
  SpectrumResult spectrum;
  Coeffs gradient;
  bool degenerate = false;
};

Evaluation evaluate(const CurvatureProfile& kappa, double g, std::size_t n,
                    const std::vector<std::vector<double>>& basis,
                    std::span<const double> warm) {
  const OperatorSpec spec(kappa, g);
  Evaluation e{ground_state(spec, n, 1, warm), {}, false};
  const auto grad = hf_gradient_kappa(spec, e.spectrum);
  e.degenerate = grad.degenerate;
  e.gradient = project(basis, grad.value);
  return e;
}

void check_config(const OptimizationConfig& c) {
  if (c.n_modes < 1) throw ParameterError("optimizer needs n_modes >= 1");
  if (c.max_iter < 0) throw ParameterError("max_iter must be nonnegative");
  if (c.n < min_operator_nodes || c.n < static_cast<std::size_t>(4 * c.n_modes))
    throw ParameterError(fmt::format("optimizer grid {} too coarse for {} modes", c.n, c.n_modes));
  if (!(c.shrink > 0.0 && c.shrink < 1.0) || !(c.armijo > 0.0 && c.armijo < 1.0) ||
      !(c.initial_step > 0.0) || !(c.gradient_tol >= 0.0) || c.max_backtracks < 1)
    throw ParameterError("invalid line-search parameters");
  if (!std::isfinite(c.g)) throw ParameterError("coupling must be finite");
}

} // namespace

CurvatureProfile random_fourier_profile(int n_modes, std::size_t n, std::uint64_t seed,
                                        double amplitude) {
  if (n_modes < 1) throw ParameterError("need at least one Fourier mode");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<FourierMode> modes(static_cast<std::size_t>(n_modes));
  for (int m = 0; m < n_modes; ++m) {
    const double scale = amplitude / static_cast<double>(m + 1);
    const double a = normal(rng);
    const double b = normal(rng);
    modes[static_cast<std::size_t>(m)] = {scale * a, scale * b};
  }
  return make_fourier_profile(modes, 1.0, n);
}

OptimizationTrace minimize_lambda1(const OptimizationConfig& config, const CurvatureProfile& init) {
  check_config(config);
  if (!init.has_full_winding())
    throw ParameterError(fmt::format("optimizer start must have winding integral 2pi, got {}",
                                     init.winding_integral()));
  if (std::abs(init.length() - 1.0) > 1e-12)
    throw ParameterError("optimizer works on unit-length profiles");

  const std::size_t n = config.n;
  const auto basis = fourier_basis(config.n_modes, n);
  CurvatureProfile kappa = init.resampled(n);
  if (config.enforce_closure) kappa = closure_project(kappa);

  Evaluation current = evaluate(kappa, config.g, n, basis, {});
  OptimizationTrace trace{{}, kappa, current.spectrum.lambda1(), false, {}, config.seed, config.g};
  double grad_norm = std::sqrt(dot(current.gradient, current.gradient));
  trace.rows.push_back({0, current.spectrum.lambda1(), grad_norm, 0.0});

  double trial_step = config.initial_step;
  for (int iter = 1;; ++iter) {
    if (current.degenerate) {
      trace.diagnostic = fmt::format("degenerate ground state at iteration {} (gap {})", iter - 1,
                                     current.spectrum.spectral_gap());
      break;
    }
    if (grad_norm <= config.gradient_tol) {
      trace.converged = true;
      trace.diagnostic = "gradient tolerance reached";
      break;
    }
    if (iter > config.max_iter) {
      trace.diagnostic = "iteration limit reached";
      break;
    }

    const double slope = -grad_norm * grad_norm;
    double step = trial_step;
    bool accepted = false;
    std::optional<CurvatureProfile> next_kappa;
    Evaluation next;
    for (int bt = 0; bt < config.max_backtracks; ++bt, step *= config.shrink) {
      std::vector<double> samples(kappa.samples().begin(), kappa.samples().end());
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double c = step * current.gradient[k];
        for (std::size_t i = 0; i < n; ++i) samples[i] -= c * basis[k][i];
      }
      try {
        CurvatureProfile candidate(std::move(samples), 1.0, kappa.kind(), kappa.winding_tolerance());
        if (config.enforce_closure) candidate = closure_project(candidate);
        next = evaluate(candidate, config.g, n, basis, current.spectrum.ground_state);
        next_kappa = std::move(candidate);
      } catch (const ConvergenceError&) {
        continue;
      }
      if (!std::isfinite(next.spectrum.lambda1()))
        throw NumericalError(fmt::format("non-finite eigenvalue at iteration {}", iter));
      if (next.spectrum.lambda1() <= current.spectrum.lambda1() + config.armijo * step * slope &&
          next.spectrum.lambda1() < current.spectrum.lambda1()) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      trace.diagnostic = fmt::format("line search stalled at iteration {}", iter);
      break;
    }

    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = (*next_kappa)[i] - kappa[i];
    Coeffs s = project(basis, delta);
    for (double& v : s) v *= 2.0; // basis functions have squared norm 1/2
    Coeffs y(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) y[k] = next.gradient[k] - current.gradient[k];
    const double sy = dot(s, y);
    trial_step = sy > 0.0 ? dot(s, s) / sy : config.initial_step;

    kappa = std::move(*next_kappa);
    current = std::move(next);
    grad_norm = std::sqrt(dot(current.gradient, current.gradient));
    trace.rows.push_back({iter, current.spectrum.lambda1(), grad_norm, step});
  }

  trace.best_profile = kappa;
  trace.best_lambda1 = current.spectrum.lambda1();
  return trace;
}

ScanResult critical_g_scan(std::span<const double> g_values, const OptimizationConfig& config,
                           int restarts, double tol) {
  if (restarts < 1) throw ParameterError("need at least one restart per g");
  if (!(tol > 0.0)) throw ParameterError("circle-optimality tolerance must be positive");
  for (double g : g_values)
    if (!(g > 0.0 && g <= 2.0)) throw ParameterError(fmt::format("scan g = {} outside (0, 2]", g));
  check_config(config);

  std::vector<double> sorted(g_values.begin(), g_values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const std::size_t per_g = static_cast<std::size_t>(restarts);
  ScanResult scan;
  scan.tol = tol;
  scan.rows.resize(sorted.size() * per_g);
  const auto tasks = static_cast<std::ptrdiff_t>(scan.rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const std::size_t gi = static_cast<std::size_t>(t) / per_g;
    const std::size_t ri = static_cast<std::size_t>(t) % per_g;
    ScanRow& row = scan.rows[static_cast<std::size_t>(t)];
    OptimizationConfig c = config;
    c.g = sorted[gi];
    c.seed = config.seed + ri;
    row.g = c.g;
    row.seed = c.seed;
    row.circle_value = 4.0 * pi * pi * c.g;
    try {
      const auto start = random_fourier_profile(c.n_modes, c.n, c.seed);
      auto run = minimize_lambda1(c, start);
      row.best_lambda1 = run.best_lambda1;
      row.converged = run.converged;
      row.diagnostic = run.diagnostic;
      row.best_profile = std::move(run.best_profile);
    } catch (const std::exception& e) {
      row.best_lambda1 = std::numeric_limits<double>::quiet_NaN();
      row.diagnostic = e.what();
    }
    row.gap = row.circle_value - row.best_lambda1;
    row.circle_optimal = !(row.gap > tol);
  }

  for (std::size_t gi = 0; gi < sorted.size() && !scan.g_star; ++gi)
    for (std::size_t ri = 0; ri < per_g; ++ri)
      if (!scan.rows[gi * per_g + ri].circle_optimal) {
        scan.g_star = sorted[gi];
        break;
      }
  return scan;
}

void write_optimization_trace_csv(std::ostream& out, const OptimizationTrace& trace) {
  CsvWriter csv(out);
  csv.header({"iteration", "lambda1", "gradient_norm", "step"});
  for (const auto& r : trace.rows)
    csv.field(r.iteration).field(r.lambda1).field(r.gradient_norm).field(r.step).end_row();
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  CsvWriter csv(out);
  csv.header({"g", "seed", "best_lambda1", "circle_value", "gap", "circle_optimal"});
  for (const auto& r : scan.rows)
    csv.field(r.g)
        .field(static_cast<std::int64_t>(r.seed))
        .field(r.best_lambda1)
        .field(r.circle_value)
        .field(r.gap)
        .field(r.circle_optimal)
        .end_row();
}

nlohmann::json scan_to_json(const ScanResult& scan) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : scan.rows)
    rows.push_back({{"g", r.g},
                    {"seed", r.seed},
                    {"best_lambda1", r.best_lambda1},
                    {"circle_value", r.circle_value},
                    {"gap", r.gap},
                    {"circle_optimal", r.circle_optimal},
                    {"converged", r.converged},
                    {"diagnostic", r.diagnostic}});
  nlohmann::json j{{"tol", scan.tol}, {"rows", rows}};
  j["g_star"] = scan.g_star ? nlohmann::json(*scan.g_star) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json trace_to_json(const OptimizationTrace& trace) {
  return {{"g", trace.g},
          {"seed", trace.seed},
          {"best_lambda1", trace.best_lambda1},
          {"converged", trace.converged},
          {"diagnostic", trace.diagnostic},
          {"iterations", trace.rows.empty() ? 0 : trace.rows.back().iteration},
          {"best_profile", profile_to_json(trace.best_profile)}};
}

} // namespace curvspec
