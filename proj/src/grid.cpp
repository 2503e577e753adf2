#include "curvspec/grid.hpp"

#include <cmath>

namespace curvspec::grid {

std::vector<double> nodes(std::size_t n, double length) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = node(i, n, length);
  return s;
}

double integrate(std::span<const double> f, double length) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * length / static_cast<double>(f.size());
}

double inner(std::span<const double> a, std::span<const double> b, double length) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * length / static_cast<double>(a.size());
}

double norm(std::span<const double> f, double length) {
  return std::sqrt(inner(f, f, length));
}

std::vector<double> cyclic_shift(std::span<const double> f, std::ptrdiff_t shift) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  std::vector<double> out(f.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::ptrdiff_t j = (i + shift) % n;
    if (j < 0) j += n;
    out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(j)];
  }
  return out;
}

double dirichlet_energy(std::span<const double> f, double length) {
  const std::size_t n = f.size();
  const double h = length / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = f[(i + 1) % n] - f[i];
    sum += diff * diff;
  }
  return sum / h;
}

std::vector<double> negative_laplacian(std::span<const double> f, double length) {
  const std::size_t n = f.size();
  const double h = length / static_cast<double>(n);
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = f[(i + n - 1) % n];
    const double right = f[(i + 1) % n];
    out[i] = (2.0 * f[i] - left - right) * inv_h2;
  }
  return out;
}

} // namespace curvspec::grid
