#include "curvspec/annulus_2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "curvspec/csv.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/kernels.hpp"
#include "curvspec/linalg.hpp"

namespace curvspec {

namespace {

constexpr std::size_t min_fermi_nodes = 16;

void check_fermi_grid(std::size_t ns, std::size_t nr) {
  if (ns < min_fermi_nodes || nr < min_fermi_nodes)
    throw ParameterError(fmt::format("Fermi grid needs Ns, Nr >= {}, got ({}, {})",
                                     min_fermi_nodes, ns, nr));
}

kernels::FermiStencil assemble_stencil(const CurvatureProfile& kappa, double d, double sign,
                                       std::size_t nr) {
  const std::size_t ns = kappa.size();
  const double hs = kappa.spacing();
  const double hr = d / static_cast<double>(nr);
  const std::size_t interior = nr - 1;

  kernels::FermiStencil st;
  st.ns = ns;
  st.nr = interior;
  st.s_face.resize(ns * interior);
  st.r_face.resize(ns * nr);
  st.mass.resize(ns * interior);

  for (std::size_t i = 0; i < ns; ++i) {
    const double k_node = kappa[i];
    const double k_face = 0.5 * (kappa[i] + kappa[(i + 1) % ns]);
    for (std::size_t j = 0; j < interior; ++j) {
      const double r = static_cast<double>(j + 1) * hr;
      const double rho_face = 1.0 + sign * k_face * r;
      const double rho_node = 1.0 + sign * k_node * r;
      if (!(rho_face > 0.0) || !(rho_node > 0.0))
        throw GeometryError(fmt::format("Fermi Jacobian nonpositive at s-node {}, r = {}", i, r));
      st.s_face[i * interior + j] = (hr / hs) / rho_face;
      st.mass[i * interior + j] = hs * hr * rho_node;
    }
    for (std::size_t k = 0; k < nr; ++k) {
      const double r = (static_cast<double>(k) + 0.5) * hr;
      const double rho = 1.0 + sign * k_node * r;
      if (!(rho > 0.0))
        throw GeometryError(fmt::format("Fermi Jacobian nonpositive at s-node {}, r = {}", i, r));
      st.r_face[i * nr + k] = (hs / hr) * rho;
    }
  }
  return st;
}

Eigen::SparseMatrix<double> stiffness_matrix(const kernels::FermiStencil& st) {
  const std::size_t ns = st.ns;
  const std::size_t nr = st.nr;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(st.unknowns() * 5);
  auto idx = [nr](std::size_t i, std::size_t j) { return static_cast<int>(i * nr + j); };
  for (std::size_t i = 0; i < ns; ++i) {
    const std::size_t next = (i + 1) % ns;
    for (std::size_t j = 0; j < nr; ++j) {
      const double ws = st.s_face[i * nr + j];
      triplets.emplace_back(idx(i, j), idx(i, j), ws);
      triplets.emplace_back(idx(next, j), idx(next, j), ws);
      triplets.emplace_back(idx(i, j), idx(next, j), -ws);
      triplets.emplace_back(idx(next, j), idx(i, j), -ws);

      const double below = st.r_face[i * (nr + 1) + j];
      const double above = st.r_face[i * (nr + 1) + j + 1];
      triplets.emplace_back(idx(i, j), idx(i, j), below + above);
      if (j + 1 < nr) {
        triplets.emplace_back(idx(i, j), idx(i, j + 1), -above);
        triplets.emplace_back(idx(i, j + 1), idx(i, j), -above);
      }
    }
  }
  Eigen::SparseMatrix<double> k(static_cast<Eigen::Index>(st.unknowns()),
                                static_cast<Eigen::Index>(st.unknowns()));
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

double row_sum_norm(const Eigen::SparseMatrix<double>& k) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(k.rows());
  for (Eigen::Index c = 0; c < k.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it)
      sums(it.row()) += std::abs(it.value());
  return sums.maxCoeff();
}

} // namespace

const char* to_string(Orientation o) {
  return o == Orientation::edge_is_inner ? "edge_is_inner" : "edge_is_outer";
}

Orientation orientation_from_string(const std::string& name) {
  if (name == "edge_is_inner" || name == "inner") return Orientation::edge_is_inner;
  if (name == "edge_is_outer" || name == "outer") return Orientation::edge_is_outer;
  throw ParameterError(fmt::format("unknown orientation '{}'", name));
}

AnnularDomain::AnnularDomain(CurvatureProfile profile, double thickness, Orientation orientation,
                             double margin)
    : profile_(std::move(profile)), thickness_(thickness), orientation_(orientation) {
  if (std::abs(profile_.length() - two_pi) > 1e-12)
    throw ParameterError(fmt::format("annular domain edge must have length 2pi, got {}",
                                     profile_.length()));
  if (!(thickness_ > 0.0) || !std::isfinite(thickness_))
    throw ParameterError(fmt::format("thickness must be positive, got {}", thickness_));
  if (!(margin > 0.0 && margin < 1.0))
    throw ParameterError("curvature margin must lie in (0, 1)");
  const double worst = profile_.max_abs() * thickness_;
  if (worst > margin)
    throw GeometryError(fmt::format("max |kappa| d = {} exceeds the admissible {}", worst, margin));
}

Spectrum2D ground_state_2d(const AnnularDomain& domain, std::size_t ns, std::size_t nr) {
  check_fermi_grid(ns, nr);
  const auto kappa = domain.profile().resampled(ns);
  const double d = domain.thickness();
  const auto stencil = assemble_stencil(kappa, d, domain.sign(), nr);
  const auto kmat = stiffness_matrix(stencil);

  // Dropping the (positive semidefinite) s-coupling leaves independent radial
  // problems per s-row, so their minimum bounds lambda_1 from below.
  double radial_floor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns; ++i)
    radial_floor = std::min(radial_floor,
                            radial_annulus_oracle(d, domain.orientation(), nr, kappa[i]));
  const double shift = 0.95 * radial_floor;

  Eigen::SparseMatrix<double> shifted = kmat;
  for (Eigen::Index k = 0; k < shifted.rows(); ++k)
    shifted.coeffRef(k, k) -= shift * stencil.mass[static_cast<std::size_t>(k)];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success)
    throw NumericalError("sparse factorization of the Fermi stiffness matrix failed");

  const std::size_t m = stencil.unknowns();
  linalg::GeneralizedProblem problem;
  problem.dim = static_cast<Eigen::Index>(m);
  problem.apply_stiffness = [&](const linalg::Block& x, linalg::Block& y) {
    y.resize(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      kernels::apply_fermi_stiffness(stencil, {x.col(c).data(), m}, {y.col(c).data(), m});
  };
  problem.apply_mass = [&](const linalg::Block& x, linalg::Block& y) {
    y.resize(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      kernels::apply_diagonal(stencil.mass, {x.col(c).data(), m}, {y.col(c).data(), m});
  };
  problem.solve_shifted = [&](linalg::Block& b) {
    b = factor.solve(b).eval();
    if (factor.info() != Eigen::Success) throw NumericalError("sparse triangular solve failed");
  };
  problem.stiffness_norm = row_sum_norm(kmat);
  problem.mass_norm = *std::max_element(stencil.mass.begin(), stencil.mass.end());

  linalg::SubspaceOptions options;
  options.wanted = 2;
  options.guard = 10;
  const auto pairs = linalg::lowest_eigenpairs(problem, options);

  Spectrum2D out;
  out.lambda1 = pairs.values(0);
  out.lambda2 = pairs.values(1);
  out.ns = ns;
  out.nr = nr;
  out.thickness = d;
  out.iterations = pairs.iterations;

  Eigen::VectorXd v = pairs.vectors.col(0);
  double weighted = 0.0;
  for (std::size_t k = 0; k < m; ++k) weighted += stencil.mass[k] * v(static_cast<Eigen::Index>(k)) *
                                                  v(static_cast<Eigen::Index>(k));
  const double scale = (v.sum() < 0.0 ? -1.0 : 1.0) / std::sqrt(weighted);
  out.ground_state.assign(ns * (nr + 1), 0.0);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 1; j < nr; ++j)
      out.ground_state[i * (nr + 1) + j] =
          scale * v(static_cast<Eigen::Index>(i * (nr - 1) + (j - 1)));
  return out;
}

double radial_annulus_oracle(double d, Orientation orientation, std::size_t nr,
                             double edge_curvature) {
  if (!(d > 0.0)) throw ParameterError("thickness must be positive");
  const double sign = orientation_sign(orientation);
  if (sign < 0.0 && !(edge_curvature * d < 1.0))
    throw GeometryError("outer-edge annulus needs kappa d < 1");
  return linalg::weighted_dirichlet_ground(
      [=](double r) { return 1.0 + sign * edge_curvature * r; }, d, nr);
}

double level_curvature(double kappa0, double r, Orientation orientation) {
  const double rho = growth_factor(kappa0, r, orientation);
  return kappa0 / rho;
}

double growth_factor(double kappa0, double r, Orientation orientation) {
  const double rho = 1.0 + orientation_sign(orientation) * kappa0 * r;
  if (!(rho > 0.0))
    throw GeometryError(fmt::format("focal point: 1 +- kappa r = {} at kappa = {}, r = {}", rho,
                                    kappa0, r));
  return rho;
}

double effective_potential(std::span<const double> principal_curvatures) {
  if (principal_curvatures.empty()) throw ParameterError("need at least one principal curvature");
  double sum = 0.0, sum_sq = 0.0;
  for (double k : principal_curvatures) {
    sum += k;
    sum_sq += k * k;
  }
  return 0.25 * sum * sum - 0.5 * sum_sq;
}

EffectivePotentialField effective_potential_field(const AnnularDomain& domain, std::size_t ns,
                                                  std::size_t nr) {
  check_fermi_grid(ns, nr);
  const auto kappa = domain.profile().resampled(ns);
  const double hr = domain.thickness() / static_cast<double>(nr);
  EffectivePotentialField field;
  field.ns = ns;
  field.nr = nr;
  field.values.resize(ns * (nr + 1));
  field.inf_q = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j <= nr; ++j) {
      const double k = level_curvature(kappa[i], static_cast<double>(j) * hr, domain.orientation());
      const double q = effective_potential(std::span<const double>(&k, 1));
      field.values[i * (nr + 1) + j] = q;
      field.inf_q = std::min(field.inf_q, q);
    }
  return field;
}

CurvatureLowerBound curvature_lower_bound(const AnnularDomain& domain, std::size_t ns, std::size_t nr) {
  const auto field = effective_potential_field(domain, ns, nr);
  const double d = domain.thickness();
  return {pi * pi / (d * d) + field.inf_q, field.inf_q};
}

double discretization_margin(double lambda_coarse, double lambda_fine) {
  return 2.0 * std::abs(lambda_coarse - lambda_fine);
}

nlohmann::json domain_to_json(const AnnularDomain& domain) {
  return {{"profile", profile_to_json(domain.profile())},
          {"d", domain.thickness()},
          {"orientation", to_string(domain.orientation())}};
}

AnnularDomain domain_from_json(const nlohmann::json& j) {
  try {
    return AnnularDomain(profile_from_json(j.at("profile")), j.at("d").get<double>(),
                         orientation_from_string(j.value("orientation", "edge_is_inner")));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("domain json: ") + e.what());
  }
}

void write_spectrum2d_csv(std::ostream& out, const Spectrum2D& spectrum) {
  CsvWriter csv(out);
  csv.header({"s", "r", "psi"});
  const double hr = spectrum.thickness / static_cast<double>(spectrum.nr);
  for (std::size_t i = 0; i < spectrum.ns; ++i)
    for (std::size_t j = 0; j <= spectrum.nr; ++j)
      csv.field(grid::node(i, spectrum.ns, two_pi))
          .field(static_cast<double>(j) * hr)
          .field(spectrum.psi(i, j))
          .end_row();
}

} // namespace curvspec
