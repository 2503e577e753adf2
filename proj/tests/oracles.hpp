#pragma once

// Reference values computed independently of the library code paths.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-15) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Lowest Dirichlet eigenvalue of the planar annulus a < |x| < b for
// rotationally symmetric modes: first root k of J0(ka) Y0(kb) - J0(kb) Y0(ka).
inline double annulus_bessel(double a, double b) {
  auto f = [&](double k) {
    return std::cyl_bessel_j(0.0, k * a) * std::cyl_neumann(0.0, k * b) -
           std::cyl_bessel_j(0.0, k * b) * std::cyl_neumann(0.0, k * a);
  };
  const double guess = pi / (b - a);
  double lo = 0.5 * guess;
  const double dk = 1e-3 * guess;
  while (f(lo) * f(lo + dk) > 0.0) lo += dk;
  const double k = bisect(f, lo, lo + dk);
  return k * k;
}

// Smallest eigenvalue of -(w u')' = lambda w u, u(0) = u(d) = 0, by a full
// tridiagonal QR solve (Eigen) instead of Sturm bisection.
inline double radial_tridiagonal_qr(const std::function<double(double)>& w, double d, int nr) {
  const double h = d / nr;
  const int m = nr - 1;
  Eigen::VectorXd diag(m), off(m - 1);
  std::vector<double> mass(m);
  for (int j = 0; j < m; ++j) mass[j] = w((j + 1) * h) * h;
  for (int j = 0; j < m; ++j) diag(j) = (w((j + 0.5) * h) + w((j + 1.5) * h)) / h / mass[j];
  for (int j = 0; j + 1 < m; ++j) off(j) = -w((j + 1.5) * h) / h / std::sqrt(mass[j] * mass[j + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// E for zeta^2 = 1 + a cos(2 pi s) from the analytic derivative, midpoint rule.
inline double energy_cosine_density(double a, double g, int n = 1 << 16) {
  double grad = 0.0, inv = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    const double z2 = 1.0 + a * std::cos(2.0 * pi * s);
    const double dz = -a * pi * std::sin(2.0 * pi * s) / std::sqrt(z2);
    grad += dz * dz;
    inv += 1.0 / z2;
  }
  grad /= n;
  inv /= n;
  return grad + 4.0 * pi * pi * g / inv;
}

// Closed form of the same energy: pi^2 (1 - sqrt(1 - a^2)) + 4 pi^2 g sqrt(1 - a^2).
inline double energy_cosine_density_exact(double a, double g) {
  const double r = std::sqrt(1.0 - a * a);
  return pi * pi * (1.0 - r) + 4.0 * pi * pi * g * r;
}

// Thickness d with int_0^d (A0 - M0 r + 4 pi r^2) dr = V by plain bisection.
inline double shell_thickness_bisection(double A0, double M0, double V) {
  const double disc = std::max(0.0, M0 * M0 - 16.0 * pi * A0);
  const double r_max = (M0 - std::sqrt(disc)) / (8.0 * pi);
  auto f = [&](double r) { return A0 * r - 0.5 * M0 * r * r + 4.0 * pi * r * r * r / 3.0 - V; };
  return bisect(f, 0.0, r_max, 1e-16);
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace oracle
