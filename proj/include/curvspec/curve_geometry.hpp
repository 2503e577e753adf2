#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

namespace curvspec {

/// How a profile is resampled onto a different grid: trigonometric
/// interpolation for smooth data, conservative cell averages for
/// piecewise-constant data such as the stadium.
enum class ProfileKind { smooth, piecewise_constant };

/// Curvature of a closed plane curve as a periodic grid function of
/// arclength on the midpoint grid s_i = (i + 1/2) L / N.
///
/// The winding integral is computed once at construction. A profile whose
/// winding integral is not 2pi is still representable (straight-strip test
/// hooks need kappa = 0); has_full_winding() reports the admissibility flag.
class CurvatureProfile {
public:
  static constexpr std::size_t min_nodes = 16;
  static constexpr double default_winding_tolerance = 1e-9;

  CurvatureProfile(std::vector<double> samples, double length,
                   ProfileKind kind = ProfileKind::smooth,
                   double winding_tolerance = default_winding_tolerance);

  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / static_cast<double>(samples_.size()); }
  ProfileKind kind() const noexcept { return kind_; }

  double winding_integral() const noexcept { return winding_; }
  double winding_tolerance() const noexcept { return winding_tolerance_; }
  bool has_full_winding() const noexcept;

  double max_abs() const noexcept;

  /// Same curve scaled to a new total length; curvature scales by L / L'.
  CurvatureProfile rescaled(double new_length) const;
  /// samples'[i] = samples[i + shift mod N].
  CurvatureProfile shifted(std::ptrdiff_t shift) const;
  /// Resample onto n nodes according to kind().
  CurvatureProfile resampled(std::size_t n) const;

private:
  std::vector<double> samples_;
  double length_;
  ProfileKind kind_;
  double winding_tolerance_;
  double winding_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Arclength-parametrized reconstruction. Both arrays hold N + 1 entries at
/// t_j = j L / N, j = 0..N; theta[0] = 0 and positions[0] = origin.
struct PlanarCurve {
  std::vector<double> tangent_angle;
  std::vector<Point2> positions;
  double length = 0.0;
};

struct ClosureReport {
  double winding = 0.0; ///< theta(L) / 2pi
  double gap = 0.0;     ///< |x(L) - x(0)|
  bool closed = false;
};

/// Coefficients of cos(2 pi n s / L) and sin(2 pi n s / L); entry k is mode n = k + 1.
struct FourierMode {
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

CurvatureProfile make_circle(double length, std::size_t n);

/// Stadium of unit length: curvature pi/eps on the arcs (1/2 - eps, 1/2)
/// and (1 - eps, 1), zero on the straight segments. Arc membership is
/// decided per node and the arc value rescaled so the discrete winding
/// integral is exactly 2pi.
CurvatureProfile make_stadium(double eps, std::size_t n);

/// kappa = 2pi/L + sum_n (a_n cos + b_n sin); the discrete mean of the
/// perturbation is removed so the winding integral is 2pi to rounding.
CurvatureProfile make_fourier_profile(std::span<const FourierMode> modes, double length,
                                      std::size_t n);

/// Periodic Gaussian smoothing of width `width` (arclength units). Preserves
/// the winding integral; result is tagged smooth.
CurvatureProfile mollify(const CurvatureProfile& profile, double width);

/// Tangent angle and positions by cumulative midpoint integration.
PlanarCurve reconstruct(const CurvatureProfile& profile);

ClosureReport closure_report(const PlanarCurve& curve, double tol = 1e-8);

/// Closes the curve by Newton iteration on the two closure functionals
/// (int cos theta, int sin theta), adjusting Fourier modes n = 1, 2 with the
/// minimum-norm step. Throws ConvergenceError carrying the last gap.
CurvatureProfile closure_project(const CurvatureProfile& profile, double tol = 1e-10,
                                 int max_iter = 50);

/// max_i |a_i - b_i|; profiles must share the grid.
double sup_distance(const CurvatureProfile& a, const CurvatureProfile& b);

// Line format: length, N, then one sample per line.
void write_profile_text(std::ostream& out, const CurvatureProfile& profile);
CurvatureProfile read_profile_text(std::istream& in);

nlohmann::json profile_to_json(const CurvatureProfile& profile);
CurvatureProfile profile_from_json(const nlohmann::json& j);

} // namespace curvspec
