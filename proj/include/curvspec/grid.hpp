#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace curvspec {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace grid {

// Uniform periodic midpoint grid: s_i = (i + 1/2) L / N.
inline double node(std::size_t i, std::size_t n, double length) {
  return (static_cast<double>(i) + 0.5) * length / static_cast<double>(n);
}

std::vector<double> nodes(std::size_t n, double length);

/// Midpoint-rule integral of a periodic grid function over [0, length).
double integrate(std::span<const double> f, double length);

/// Midpoint-rule L2 inner product.
double inner(std::span<const double> a, std::span<const double> b, double length);

/// L2 norm (midpoint rule).
double norm(std::span<const double> f, double length);

/// Cyclic shift: out[i] = f[(i + shift) mod n].
std::vector<double> cyclic_shift(std::span<const double> f, std::ptrdiff_t shift);

/// Integral of the squared face differences, sum_i h ((f[i+1]-f[i])/h)^2,
/// with periodic wrap. This is the quadratic form of the three-point
/// periodic Laplacian, so Rayleigh quotients built on it are consistent
/// with the discrete operators.
double dirichlet_energy(std::span<const double> f, double length);

/// (-d^2/ds^2 f)_i by the three-point periodic stencil.
std::vector<double> negative_laplacian(std::span<const double> f, double length);

} // namespace grid
} // namespace curvspec
