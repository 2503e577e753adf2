#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace curvspec {

/// A convex shell described only through the area A0 of its outer edge, the
/// total mean curvature M0 of that edge and the enclosed volume V. The
/// parallel surfaces at inward distance r have area A0 - M0 r + 4 pi r^2.
class ShellProfile {
public:
  /// Throws ParameterError for A0 <= 0, V <= 0 or M0 < 4 sqrt(pi A0)
  /// (8 pi at the unit-sphere area) and GeometryError when the area would
  /// vanish before V is reached.
  ShellProfile(double A0, double M0, double V);

  static ShellProfile sphere(double A0, double V);

  double area() const noexcept { return A0_; }
  double total_mean_curvature() const noexcept { return M0_; }
  double volume() const noexcept { return V_; }
  double thickness() const noexcept { return d_; }
  /// sqrt(A0 / 4 pi): lengths scale by this factor relative to A0 = 4 pi.
  double scale() const noexcept;
  bool is_sphere() const noexcept;

private:
  double A0_;
  double M0_;
  double V_;
  double d_;
};

double steiner_area(const ShellProfile& profile, double r);

/// int_0^r A, the cubic antiderivative of the Steiner area.
double enclosed_volume(const ShellProfile& profile, double r);

/// The unique d in the first positivity interval of A with int_0^d A = V
/// (bracketed TOMS 748 root solve). Same value the constructor stores.
double thickness_from_volume(const ShellProfile& profile);

/// Thickness of the spherical shell with outer area A0 and volume V.
double sphere_shell_thickness(double A0, double V);

/// lambda_1 of -(A u')' = lambda A u on (0, d), u(0) = u(d) = 0, three-point
/// scheme on Nr intervals. An upper bound for the shell's Dirichlet
/// eigenvalue (radial test functions), not the shell eigenvalue itself.
double reduced_ground_state(const ShellProfile& profile, std::size_t nr);

/// Nodes r_j = j d / Nr, j = 0..Nr, the matched sphere coordinate r'(r_j)
/// with int_0^{r'} A_sphere = int_0^r A, and ratio A(r) / A_sphere(r').
struct VariableChange {
  std::vector<double> r;
  std::vector<double> rprime;
  std::vector<double> ratio;
};

VariableChange variable_change(const ShellProfile& profile, std::size_t nr);

struct ShellSweepRow {
  double M0 = 0.0;
  double d = 0.0;
  double lambda1 = 0.0;        ///< reduced value
  double lambda1_sphere = 0.0; ///< reduced value of the sphere shell with the same A0, V
  double ratio_max = 0.0;      ///< max_j |1 - ratio_j|
};

/// One row per M0, in input order; rows are computed in parallel.
std::vector<ShellSweepRow> shell_sweep(double A0, double V, std::span<const double> m0_values,
                                       std::size_t nr);

/// Columns (M0, d, lambda1, lambda1_sphere, ratio_max).
void write_shell_sweep_csv(std::ostream& out, const std::vector<ShellSweepRow>& rows);

} // namespace curvspec
