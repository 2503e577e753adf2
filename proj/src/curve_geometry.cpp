#include "curvspec/curve_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"

namespace curvspec {

namespace {

void check_grid(std::size_t n, double length) {
  if (n < CurvatureProfile::min_nodes)
    throw ParameterError(fmt::format("grid size {} below minimum {}", n,
                                     CurvatureProfile::min_nodes));
  if (!(length > 0.0) || !std::isfinite(length))
    throw ParameterError(fmt::format("curve length must be positive, got {}", length));
}

// Trigonometric interpolation of midpoint-grid data onto a new midpoint grid.
std::vector<double> trig_resample(std::span<const double> f, double length, std::size_t n_new) {
  const std::size_t n = f.size();
  const std::size_t keep = n_new > n ? n / 2 : (n_new - 1) / 2;
  const double w = two_pi / length;

  std::vector<double> a(keep + 1, 0.0), b(keep + 1, 0.0);
  for (std::size_t m = 0; m <= keep; ++m) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = w * static_cast<double>(m) * grid::node(i, n, length);
      sa += f[i] * std::cos(phase);
      sb += f[i] * std::sin(phase);
    }
    const bool nyquist = (2 * m == n);
    const double scale = (m == 0 || nyquist) ? 1.0 / static_cast<double>(n)
                                             : 2.0 / static_cast<double>(n);
    a[m] = sa * scale;
    b[m] = sb * scale;
  }

  std::vector<double> out(n_new);
  for (std::size_t j = 0; j < n_new; ++j) {
    const double phase = w * grid::node(j, n_new, length);
    double value = a[0];
    for (std::size_t m = 1; m <= keep; ++m)
      value += a[m] * std::cos(phase * static_cast<double>(m)) +
               b[m] * std::sin(phase * static_cast<double>(m));
    out[j] = value;
  }
  return out;
}

// Conservative cell averages of a piecewise-constant function.
std::vector<double> cell_average_resample(std::span<const double> f, double length,
                                          std::size_t n_new) {
  const std::size_t n = f.size();
  const double h_old = length / static_cast<double>(n);
  const double h_new = length / static_cast<double>(n_new);
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative[i + 1] = cumulative[i] + f[i] * h_old;

  auto integral_to = [&](double x) {
    const double cell = std::clamp(x / h_old, 0.0, static_cast<double>(n));
    const auto i = std::min(static_cast<std::size_t>(cell), n - 1);
    return cumulative[i] + f[i] * (x - static_cast<double>(i) * h_old);
  };

  std::vector<double> out(n_new);
  for (std::size_t j = 0; j < n_new; ++j) {
    const double lo = static_cast<double>(j) * h_new;
    const double hi = j + 1 == n_new ? length : lo + h_new;
    out[j] = (integral_to(hi) - integral_to(lo)) / h_new;
  }
  return out;
}

// Cumulative midpoint integral evaluated at the midpoint nodes:
// out_j = h sum_{i<j} f_i + (h/2) f_j.
std::vector<double> midpoint_cumulative(std::span<const double> f, double h) {
  std::vector<double> out(f.size());
  double running = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    out[j] = running + 0.5 * h * f[j];
    running += h * f[j];
  }
  return out;
}

} // namespace

CurvatureProfile::CurvatureProfile(std::vector<double> samples, double length, ProfileKind kind,
                                   double winding_tolerance)
    : samples_(std::move(samples)), length_(length), kind_(kind),
      winding_tolerance_(winding_tolerance) {
  check_grid(samples_.size(), length_);
  for (double v : samples_)
    if (!std::isfinite(v)) throw ParameterError("curvature samples must be finite");
  if (!(winding_tolerance_ >= 0.0)) throw ParameterError("winding tolerance must be nonnegative");
  winding_ = grid::integrate(samples_, length_);
}

bool CurvatureProfile::has_full_winding() const noexcept {
  return std::abs(winding_ - two_pi) <= winding_tolerance_ * two_pi;
}

double CurvatureProfile::max_abs() const noexcept {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

CurvatureProfile CurvatureProfile::rescaled(double new_length) const {
  if (!(new_length > 0.0)) throw ParameterError("rescaled length must be positive");
  const double factor = length_ / new_length;
  std::vector<double> out(samples_);
  for (double& v : out) v *= factor;
  return CurvatureProfile(std::move(out), new_length, kind_, winding_tolerance_);
}

CurvatureProfile CurvatureProfile::shifted(std::ptrdiff_t shift) const {
  return CurvatureProfile(grid::cyclic_shift(samples_, shift), length_, kind_, winding_tolerance_);
}

CurvatureProfile CurvatureProfile::resampled(std::size_t n) const {
  if (n == samples_.size()) return *this;
  check_grid(n, length_);
  auto out = kind_ == ProfileKind::smooth ? trig_resample(samples_, length_, n)
                                          : cell_average_resample(samples_, length_, n);
  return CurvatureProfile(std::move(out), length_, kind_, winding_tolerance_);
}

CurvatureProfile make_circle(double length, std::size_t n) {
  check_grid(n, length);
  return CurvatureProfile(std::vector<double>(n, two_pi / length), length);
}

CurvatureProfile make_stadium(double eps, std::size_t n) {
  if (!(eps > 0.0 && eps < 0.5))
    throw ParameterError(fmt::format("stadium eps must lie in (0, 1/2), got {}", eps));
  check_grid(n, 1.0);

  std::vector<bool> on_arc(n, false);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid::node(i, n, 1.0);
    const bool first = s > 0.5 - eps && s < 0.5;
    const bool second = s > 1.0 - eps && s < 1.0;
    if (first || second) {
      on_arc[i] = true;
      ++count;
    }
  }
  if (count == 0)
    throw ParameterError(fmt::format("stadium arcs of width {} unresolved on {} nodes", eps, n));

  const double h = 1.0 / static_cast<double>(n);
  const double arc_value = two_pi / (static_cast<double>(count) * h);
  std::vector<double> kappa(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (on_arc[i]) kappa[i] = arc_value;
  return CurvatureProfile(std::move(kappa), 1.0, ProfileKind::piecewise_constant);
}

CurvatureProfile make_fourier_profile(std::span<const FourierMode> modes, double length,
                                      std::size_t n) {
  check_grid(n, length);
  if (n < 4 * modes.size())
    throw ParameterError(fmt::format("{} nodes cannot carry {} Fourier modes", n, modes.size()));

  std::vector<double> perturbation(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = two_pi * grid::node(i, n, length) / length;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double m = static_cast<double>(k + 1);
      perturbation[i] += modes[k].cos_coeff * std::cos(m * phase) +
                         modes[k].sin_coeff * std::sin(m * phase);
    }
  }
  double mean = 0.0;
  for (double v : perturbation) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> kappa(n);
  for (std::size_t i = 0; i < n; ++i) kappa[i] = two_pi / length + (perturbation[i] - mean);
  return CurvatureProfile(std::move(kappa), length);
}

CurvatureProfile mollify(const CurvatureProfile& profile, double width) {
  if (!(width > 0.0)) throw ParameterError("mollifier width must be positive");
  const std::size_t n = profile.size();
  const double h = profile.spacing();
  const double length = profile.length();

  // Kernel on grid offsets, wrapped periodically and normalized to unit sum.
  std::vector<double> kernel(n, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double offset = static_cast<double>(k) * h;
    if (offset > 0.5 * length) offset -= length;
    const double z = offset / width;
    kernel[k] = z * z > 1400.0 ? 0.0 : std::exp(-0.5 * z * z);
    total += kernel[k];
  }
  for (double& v : kernel) v /= total;

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (kernel[k] == 0.0) continue;
      acc += kernel[k] * profile[(i + n - k) % n];
    }
    out[i] = acc;
  }
  return CurvatureProfile(std::move(out), length, ProfileKind::smooth,
                          profile.winding_tolerance());
}

PlanarCurve reconstruct(const CurvatureProfile& profile) {
  const std::size_t n = profile.size();
  const double h = profile.spacing();
  PlanarCurve curve;
  curve.length = profile.length();
  curve.tangent_angle.resize(n + 1);
  curve.positions.resize(n + 1);
  curve.tangent_angle[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double theta_mid = curve.tangent_angle[j] + 0.5 * h * profile[j];
    curve.tangent_angle[j + 1] = curve.tangent_angle[j] + h * profile[j];
    curve.positions[j + 1] = {curve.positions[j].x + h * std::cos(theta_mid),
                              curve.positions[j].y + h * std::sin(theta_mid)};
  }
  return curve;
}

ClosureReport closure_report(const PlanarCurve& curve, double tol) {
  ClosureReport report;
  report.winding = curve.tangent_angle.back() / two_pi;
  const Point2 end = curve.positions.back();
  const Point2 start = curve.positions.front();
  report.gap = std::hypot(end.x - start.x, end.y - start.y);
  report.closed = report.gap <= tol && std::abs(report.winding - 1.0) <= tol;
  return report;
}

CurvatureProfile closure_project(const CurvatureProfile& profile, double tol, int max_iter) {
  if (!profile.has_full_winding())
    throw ParameterError(fmt::format("closure projection needs winding integral 2pi, got {}",
                                     profile.winding_integral()));
  const std::size_t n = profile.size();
  const double length = profile.length();
  const double h = profile.spacing();

  // Correction basis: cos/sin of modes 1 and 2, and their cumulative integrals.
  std::array<std::vector<double>, 4> basis;
  std::array<std::vector<double>, 4> basis_cumulative;
  for (int k = 0; k < 4; ++k) {
    basis[k].resize(n);
    const double m = static_cast<double>(k / 2 + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = m * two_pi * grid::node(i, n, length) / length;
      basis[k][i] = (k % 2 == 0) ? std::cos(phase) : std::sin(phase);
    }
    basis_cumulative[k] = midpoint_cumulative(basis[k], h);
  }

  std::vector<double> kappa(profile.samples().begin(), profile.samples().end());
  double gap = 0.0;
  for (int iter = 0; iter <= max_iter; ++iter) {
    const auto theta = midpoint_cumulative(kappa, h);
    Eigen::Vector2d residual = Eigen::Vector2d::Zero();
    Eigen::Matrix<double, 2, 4> jacobian = Eigen::Matrix<double, 2, 4>::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      const double c = std::cos(theta[j]);
      const double s = std::sin(theta[j]);
      residual(0) += h * c;
      residual(1) += h * s;
      for (int k = 0; k < 4; ++k) {
        jacobian(0, k) -= h * s * basis_cumulative[k][j];
        jacobian(1, k) += h * c * basis_cumulative[k][j];
      }
    }
    gap = residual.norm();
    if (gap <= tol)
      return CurvatureProfile(std::move(kappa), length, profile.kind(),
                              profile.winding_tolerance());
    if (iter == max_iter) break;

    const Eigen::Matrix2d normal = jacobian * jacobian.transpose();
    const Eigen::Vector4d step = -jacobian.transpose() * normal.ldlt().solve(residual);
    if (!step.allFinite()) throw NumericalError("closure projection produced a non-finite step");
    for (int k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < n; ++i) kappa[i] += step(k) * basis[k][i];
  }
  throw ConvergenceError(fmt::format("closure projection did not reach gap {} after {} steps "
                                     "(last gap {})",
                                     tol, max_iter, gap),
                         gap);
}

double sup_distance(const CurvatureProfile& a, const CurvatureProfile& b) {
  if (a.size() != b.size()) throw ParameterError("profiles live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void write_profile_text(std::ostream& out, const CurvatureProfile& profile) {
  out << fmt::format("{:.17g}\n{}\n", profile.length(), profile.size());
  for (double v : profile.samples()) out << fmt::format("{:.17g}\n", v);
}

CurvatureProfile read_profile_text(std::istream& in) {
  double length = 0.0;
  std::size_t n = 0;
  if (!(in >> length >> n)) throw ParameterError("profile text: malformed two-line header");
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(in >> samples[i]))
      throw ParameterError(fmt::format("profile text: expected {} samples, read {}", n, i));
  return CurvatureProfile(std::move(samples), length);
}

nlohmann::json profile_to_json(const CurvatureProfile& profile) {
  return {{"length", profile.length()},
          {"N", profile.size()},
          {"kind", profile.kind() == ProfileKind::smooth ? "smooth" : "piecewise_constant"},
          {"samples", std::vector<double>(profile.samples().begin(), profile.samples().end())}};
}

CurvatureProfile profile_from_json(const nlohmann::json& j) {
  try {
    auto samples = j.at("samples").get<std::vector<double>>();
    const auto n = j.at("N").get<std::size_t>();
    if (samples.size() != n)
      throw ParameterError(fmt::format("profile json: N = {} but {} samples", n, samples.size()));
    const auto kind = j.value("kind", std::string("smooth")) == "piecewise_constant"
                          ? ProfileKind::piecewise_constant
                          : ProfileKind::smooth;
    return CurvatureProfile(std::move(samples), j.at("length").get<double>(), kind);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("profile json: ") + e.what());
  }
}

} // namespace curvspec
