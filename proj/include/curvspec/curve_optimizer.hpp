#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvspec/curve_geometry.hpp"

namespace curvspec {

struct OptimizationConfig {
  double g = 0.2;
  int n_modes = 8;
  int max_iter = 400;
  std::size_t n = 256;          ///< operator grid
  double gradient_tol = 1e-6;   ///< stop when the coefficient gradient norm drops below this
  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;    ///< first trial step; Barzilai-Borwein afterwards
  int max_backtracks = 40;
  std::uint64_t seed = 1;
  bool enforce_closure = false;
};

struct OptimizationRow {
  int iteration = 0;
  double lambda1 = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0; ///< accepted step length (0 on the initial row)
};

struct OptimizationTrace {
  std::vector<OptimizationRow> rows;
  CurvatureProfile best_profile;
  double best_lambda1 = 0.0;
  bool converged = false;
  std::string diagnostic; ///< why the run stopped
  std::uint64_t seed = 0;
  double g = 0.0;
};

/// Unit-length profile 2pi + sum_{n <= n_modes} (a_n cos + b_n sin) with
/// a_n, b_n ~ amplitude N(0, 1) / n drawn from `seed`.
CurvatureProfile random_fourier_profile(int n_modes, std::size_t n, std::uint64_t seed,
                                        double amplitude = 1.0);

/// Gradient descent on the Fourier coefficients 1..n_modes of kappa (the mean
/// is never touched, so the winding integral stays 2pi). Hellmann-Feynman
/// gradients, Barzilai-Borwein trial steps with Armijo backtracking; every
/// accepted step lowers lambda_1. A degenerate ground state stops the run
/// with a diagnostic.
OptimizationTrace minimize_lambda1(const OptimizationConfig& config, const CurvatureProfile& init);

struct ScanRow {
  double g = 0.0;
  std::uint64_t seed = 0;
  double best_lambda1 = 0.0;
  double circle_value = 0.0;
  double gap = 0.0; ///< circle_value - best_lambda1
  bool circle_optimal = false;
  bool converged = false;
  std::string diagnostic;
  std::optional<CurvatureProfile> best_profile; ///< empty when the run threw
};

struct ScanResult {
  std::vector<ScanRow> rows; ///< sorted by g, then seed
  /// Smallest g whose best restart beats the circle by more than tol.
  std::optional<double> g_star;
  double tol = 0.0;
};

inline constexpr double circle_optimal_tol = 1e-2;

/// Runs `restarts` seeded random starts (seeds config.seed, config.seed + 1,
/// ...) at every g; all runs are independent and execute in parallel.
ScanResult critical_g_scan(std::span<const double> g_values, const OptimizationConfig& config,
                           int restarts = 10, double tol = circle_optimal_tol);

/// Columns (iteration, lambda1, gradient_norm, step).
void write_optimization_trace_csv(std::ostream& out, const OptimizationTrace& trace);
/// Columns (g, seed, best_lambda1, circle_value, gap, circle_optimal).
void write_scan_csv(std::ostream& out, const ScanResult& scan);
nlohmann::json scan_to_json(const ScanResult& scan);
nlohmann::json trace_to_json(const OptimizationTrace& trace);

} // namespace curvspec
