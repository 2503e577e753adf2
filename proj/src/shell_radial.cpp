#include "curvspec/shell_radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "curvspec/csv.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/linalg.hpp"

namespace curvspec {

namespace {

constexpr std::size_t min_radial_intervals = 64;
constexpr double admissibility_slack = 1e-12;

double min_mean_curvature(double A0) { return 4.0 * std::sqrt(pi * A0); }

// First zero of A0 - M0 r + 4 pi r^2; the discriminant is clamped at zero so
// the sphere lands exactly on its double root.
double first_area_zero(double A0, double M0) {
  const double disc = std::max(0.0, M0 * M0 - 16.0 * pi * A0);
  return (M0 - std::sqrt(disc)) / (8.0 * pi);
}

double cubic_volume(double A0, double M0, double r) {
  return r * (A0 - 0.5 * M0 * r + (4.0 * pi / 3.0) * r * r);
}

double solve_thickness(double A0, double M0, double V) {
  const double r_max = first_area_zero(A0, M0);
  const double v_max = cubic_volume(A0, M0, r_max);
  if (!(V < v_max))
    throw GeometryError(fmt::format("volume {} reaches the focal surface (max {} for A0 = {}, "
                                    "M0 = {})",
                                    V, v_max, A0, M0));
  auto f = [&](double r) { return cubic_volume(A0, M0, r) - V; };
  std::uintmax_t max_iter = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, r_max, -V, v_max - V, tol, max_iter);
  if (max_iter >= 200) throw ConvergenceError("thickness root solve did not converge", hi - lo);
  return 0.5 * (lo + hi);
}

// r' with int_0^{r'} 4 pi (1 - x)^2 dx = F, in A0 = 4 pi units.
double matched_sphere_coordinate(double F) {
  return -std::expm1(std::log1p(-3.0 * F / (4.0 * pi)) / 3.0);
}

} // namespace

ShellProfile::ShellProfile(double A0, double M0, double V) : A0_(A0), M0_(M0), V_(V), d_(0.0) {
  if (!(A0 > 0.0) || !std::isfinite(A0))
    throw ParameterError(fmt::format("edge area must be positive, got {}", A0));
  if (!(V > 0.0) || !std::isfinite(V))
    throw ParameterError(fmt::format("shell volume must be positive, got {}", V));
  const double m_min = min_mean_curvature(A0);
  if (!std::isfinite(M0) || M0 < m_min * (1.0 - admissibility_slack))
    throw ParameterError(fmt::format("total mean curvature {} below the convex minimum {}", M0,
                                     m_min));
  d_ = solve_thickness(A0, M0, V);
  if (!(A0 - M0 * d_ + 4.0 * pi * d_ * d_ > 0.0))
    throw GeometryError("Steiner area vanishes inside the shell");
}

ShellProfile ShellProfile::sphere(double A0, double V) {
  return ShellProfile(A0, min_mean_curvature(A0), V);
}

double ShellProfile::scale() const noexcept { return std::sqrt(A0_ / (4.0 * pi)); }

bool ShellProfile::is_sphere() const noexcept {
  return std::abs(M0_ - min_mean_curvature(A0_)) <= admissibility_slack * M0_;
}

double steiner_area(const ShellProfile& p, double r) {
  if (!(r >= 0.0)) throw ParameterError("Steiner offset must be nonnegative");
  return p.area() - p.total_mean_curvature() * r + 4.0 * pi * r * r;
}

double enclosed_volume(const ShellProfile& p, double r) {
  return cubic_volume(p.area(), p.total_mean_curvature(), r);
}

double thickness_from_volume(const ShellProfile& p) {
  return solve_thickness(p.area(), p.total_mean_curvature(), p.volume());
}

double sphere_shell_thickness(double A0, double V) {
  if (!(A0 > 0.0) || !(V > 0.0)) throw ParameterError("sphere shell needs A0 > 0 and V > 0");
  const double c = std::sqrt(A0 / (4.0 * pi));
  const double v = V / (c * c * c);
  if (!(v < 4.0 * pi / 3.0)) throw GeometryError("volume exceeds the enclosed ball");
  return c * matched_sphere_coordinate(v);
}

double reduced_ground_state(const ShellProfile& p, std::size_t nr) {
  if (nr < min_radial_intervals)
    throw ParameterError(fmt::format("radial grid needs Nr >= {}, got {}", min_radial_intervals, nr));
  // Solve in A0 = 4 pi units, where the weight is O(1), and scale back.
  const double c = p.scale();
  const double m = p.total_mean_curvature() / c;
  const double d = p.thickness() / c;
  const double lambda = linalg::weighted_dirichlet_ground(
      [m](double r) { return 4.0 * pi - m * r + 4.0 * pi * r * r; }, d, nr);
  return lambda / (c * c);
}

VariableChange variable_change(const ShellProfile& p, std::size_t nr) {
  if (nr < 1) throw ParameterError("variable change needs at least one interval");
  const double c = p.scale();
  const double m = p.total_mean_curvature() / c;
  const double d = p.thickness() / c;
  VariableChange out;
  out.r.resize(nr + 1);
  out.rprime.resize(nr + 1);
  out.ratio.resize(nr + 1);
  for (std::size_t j = 0; j <= nr; ++j) {
    const double r = d * static_cast<double>(j) / static_cast<double>(nr);
    const double rp = matched_sphere_coordinate(cubic_volume(4.0 * pi, m, r));
    const double area = 4.0 * pi - m * r + 4.0 * pi * r * r;
    const double sphere_area = 4.0 * pi * (1.0 - rp) * (1.0 - rp);
    out.r[j] = c * r;
    out.rprime[j] = c * rp;
    out.ratio[j] = area / sphere_area;
  }
  return out;
}

std::vector<ShellSweepRow> shell_sweep(double A0, double V, std::span<const double> m0_values,
                                       std::size_t nr) {
  const auto sphere = ShellProfile::sphere(A0, V);
  const double lambda_sphere = reduced_ground_state(sphere, nr);
  std::vector<ShellProfile> profiles;
  profiles.reserve(m0_values.size());
  for (double m0 : m0_values) profiles.emplace_back(A0, m0, V);

  std::vector<ShellSweepRow> rows(profiles.size());
  const auto count = static_cast<std::ptrdiff_t>(profiles.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto& p = profiles[static_cast<std::size_t>(k)];
    const auto change = variable_change(p, nr);
    double worst = 0.0;
    for (double q : change.ratio) worst = std::max(worst, std::abs(1.0 - q));
    rows[static_cast<std::size_t>(k)] = {p.total_mean_curvature(), p.thickness(),
                                         reduced_ground_state(p, nr), lambda_sphere, worst};
  }
  return rows;
}

void write_shell_sweep_csv(std::ostream& out, const std::vector<ShellSweepRow>& rows) {
  CsvWriter csv(out);
  csv.header({"M0", "d", "lambda1", "lambda1_sphere", "ratio_max"});
  for (const auto& r : rows)
    csv.field(r.M0).field(r.d).field(r.lambda1).field(r.lambda1_sphere).field(r.ratio_max).end_row();
}

} // namespace curvspec
