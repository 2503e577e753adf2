#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvspec/curve_geometry.hpp"

namespace curvspec {

/// Which side of the domain the curve Omega bounds. The Fermi Jacobian is
/// 1 + kappa r when Omega is the inner edge and 1 - kappa r when it is the
/// outer edge.
enum class Orientation { edge_is_inner, edge_is_outer };

inline double orientation_sign(Orientation o) { return o == Orientation::edge_is_inner ? 1.0 : -1.0; }
const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& name);

/// Points within distance d of a closed curve of length 2pi, on one side.
class AnnularDomain {
public:
  static constexpr double default_curvature_margin = 0.95;

  /// Throws GeometryError when max |kappa| d exceeds `margin` (which keeps
  /// the Jacobian 1 +- kappa r bounded away from zero on [0, d]).
  AnnularDomain(CurvatureProfile profile, double thickness, Orientation orientation,
                double margin = default_curvature_margin);

  const CurvatureProfile& profile() const noexcept { return profile_; }
  double thickness() const noexcept { return thickness_; }
  Orientation orientation() const noexcept { return orientation_; }
  double sign() const noexcept { return orientation_sign(orientation_); }

private:
  CurvatureProfile profile_;
  double thickness_;
  Orientation orientation_;
};

/// Lowest Dirichlet eigenpair on the Fermi grid. ground_state holds the
/// full ns x (nr + 1) grid, s-major, with r index 0 at the edge and nr at
/// distance d (both boundary rows zero); normalized in the weighted L2 norm.
struct Spectrum2D {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> ground_state;
  std::size_t ns = 0;
  std::size_t nr = 0;
  double thickness = 0.0;
  int iterations = 0;

  double psi(std::size_t i, std::size_t j) const { return ground_state[i * (nr + 1) + j]; }
};

/// q(s, r) = -kappa_level(s, r)^2 / 4 on the Fermi grid (ns x (nr + 1), s-major).
struct EffectivePotentialField {
  std::size_t ns = 0;
  std::size_t nr = 0;
  std::vector<double> values;
  double inf_q = 0.0;
};

struct CurvatureLowerBound {
  double bound = 0.0; ///< pi^2 / d^2 + inf q
  double inf_q = 0.0;
};

/// Generalized eigenproblem from the Fermi-coordinate Dirichlet form
/// int int (zeta_s^2 / (1 +- kappa r) + (1 +- kappa r) zeta_r^2) ds dr with
/// mass (1 +- kappa r) ds dr; metric weights sampled at flux midpoints.
Spectrum2D ground_state_2d(const AnnularDomain& domain, std::size_t ns, std::size_t nr);

/// lambda_1 of -((1 +- c r) u')' = lambda (1 +- c r) u, u(0) = u(d) = 0, with
/// the same radial scheme as the 2D solver. c = 1 is the unit circle;
/// c = 0 is the flat strip.
double radial_annulus_oracle(double d, Orientation orientation, std::size_t nr,
                             double edge_curvature = 1.0);

/// kappa0 / (1 +- kappa0 r): curvature of the level curve at distance r.
double level_curvature(double kappa0, double r, Orientation orientation);

/// rho = 1 +- kappa0 r, the Jacobian of the Fermi map for a plane curve.
double growth_factor(double kappa0, double r, Orientation orientation);

/// (sum kappa_j)^2 / 4 - (sum kappa_j^2) / 2.
double effective_potential(std::span<const double> principal_curvatures);

EffectivePotentialField effective_potential_field(const AnnularDomain& domain, std::size_t ns,
                                                  std::size_t nr);

CurvatureLowerBound curvature_lower_bound(const AnnularDomain& domain, std::size_t ns, std::size_t nr);

/// Discretization margin from a grid-doubling pair: 2 |lambda_h - lambda_{h/2}|,
/// which bounds the error of a second-order scheme in the asymptotic range.
double discretization_margin(double lambda_coarse, double lambda_fine);

nlohmann::json domain_to_json(const AnnularDomain& domain);
AnnularDomain domain_from_json(const nlohmann::json& j);
/// Columns (s, r, psi) over the full Fermi grid.
void write_spectrum2d_csv(std::ostream& out, const Spectrum2D& spectrum);

} // namespace curvspec
