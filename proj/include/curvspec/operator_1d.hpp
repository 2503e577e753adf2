#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "curvspec/curve_geometry.hpp"

namespace curvspec {

/// H(g) = -d^2/ds^2 + g kappa^2 on a closed curve of unit length.
class OperatorSpec {
public:
  /// Throws ParameterError unless profile.length() == 1; call
  /// profile.rescaled(1.0) first for other normalizations.
  OperatorSpec(CurvatureProfile profile, double g);

  const CurvatureProfile& profile() const noexcept { return profile_; }
  double coupling() const noexcept { return g_; }

  /// g kappa^2 on an n-node grid (profile resampled if needed).
  std::vector<double> potential(std::size_t n) const;
  /// Profile on an n-node grid.
  CurvatureProfile profile_on(std::size_t n) const;

private:
  CurvatureProfile profile_;
  double g_;
};

struct SpectrumResult {
  double g = 0.0;
  std::size_t n = 0;
  std::vector<double> eigenvalues;  ///< k lowest, ascending
  std::vector<double> ground_state; ///< psi > 0, midpoint-rule normalized
  double next_eigenvalue = 0.0;     ///< lambda_2, always computed for the gap test
  int iterations = 0;

  double lambda1() const { return eigenvalues.front(); }
  double spectral_gap() const { return next_eigenvalue - eigenvalues.front(); }
};

inline constexpr std::size_t min_operator_nodes = 64;
inline constexpr double degeneracy_tolerance = 1e-8;

/// k lowest eigenvalues of the three-point periodic discretization
/// (shift-and-invert subspace iteration, O(N) per sweep). `initial_guess`
/// seeds the ground-state column when non-empty.
SpectrumResult ground_state(const OperatorSpec& spec, std::size_t n, std::size_t k,
                            std::span<const double> initial_guess = {});

/// Dense reference path (full symmetric eigensolve), kept for cross-checks
/// and small grids.
SpectrumResult ground_state_dense(const OperatorSpec& spec, std::size_t n, std::size_t k);

/// (int zeta'^2 + g kappa^2 zeta^2) / int zeta^2 with face differences and
/// the midpoint rule; zeta lives on the profile's grid.
double rayleigh_quotient(const OperatorSpec& spec, std::span<const double> zeta);

/// lambda_2 - lambda_1 < 1e-8 max(1, |lambda_1|).
bool is_degenerate(const SpectrumResult& result);

template <class T>
struct Sensitivity {
  T value;
  bool degenerate = false; ///< Hellmann-Feynman unreliable when set
};

/// d lambda_1 / d g = int kappa^2 psi^2.
Sensitivity<double> hf_gradient_g(const OperatorSpec& spec, const SpectrumResult& result);

/// First variation of lambda_1 in kappa: s -> 2 g kappa(s) psi(s)^2 (L2 gradient).
Sensitivity<std::vector<double>> hf_gradient_kappa(const OperatorSpec& spec,
                                                   const SpectrumResult& result);

nlohmann::json spectrum_to_json(const SpectrumResult& result);
/// Columns (s, psi).
void write_ground_state_csv(std::ostream& out, const SpectrumResult& result);

} // namespace curvspec
