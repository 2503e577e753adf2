#pragma once

#include <stdexcept>
#include <string>

namespace curvspec {

/// Invalid input parameter (grid size, length, coupling range, ...).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Geometric admissibility violated: focal points, |kappa| d too large,
/// Steiner area vanishing before the requested volume is reached.
class GeometryError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Eigensolver or line-search breakdown.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative procedure ran out of iterations. Carries the last residual.
class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& what, double last_residual)
      : NumericalError(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

} // namespace curvspec
