#pragma once

// Data-parallel inner loops. Every kernel has a `_serial` reference twin
// that the tests compare against; the OpenMP versions do no reductions, so
// the two agree bit for bit regardless of thread count.

#include <cstddef>
#include <span>
#include <vector>

namespace curvspec::kernels {

/// y = (-D2 + diag(potential)) x on the periodic grid of spacing h.
void apply_periodic_schrodinger(std::span<const double> potential, double h,
                                std::span<const double> x, std::span<double> y);
void apply_periodic_schrodinger_serial(std::span<const double> potential, double h,
                                       std::span<const double> x, std::span<double> y);

/// Five-point stencil on an (s, r) tensor grid, periodic in s and with
/// Dirichlet rows already eliminated in r. Unknowns are stored s-major:
/// index(i, j) = i * nr + j for i < ns, j < nr (interior r nodes only).
struct FermiStencil {
  std::size_t ns = 0;
  std::size_t nr = 0;
  /// Coupling across the face between (i, j) and (i + 1 mod ns, j): ns * nr.
  std::vector<double> s_face;
  /// Coupling across the face below (i, j), i.e. between r nodes j - 1 and
  /// j in full-grid numbering: ns * (nr + 1). Faces 0 and nr touch the
  /// Dirichlet boundary.
  std::vector<double> r_face;
  /// Lumped mass per unknown: ns * nr.
  std::vector<double> mass;

  std::size_t unknowns() const noexcept { return ns * nr; }
};

/// y = K x for the stiffness matrix encoded by the stencil.
void apply_fermi_stiffness(const FermiStencil& stencil, std::span<const double> x,
                           std::span<double> y);
void apply_fermi_stiffness_serial(const FermiStencil& stencil, std::span<const double> x,
                                  std::span<double> y);

/// y = M x (diagonal mass).
void apply_diagonal(std::span<const double> diag, std::span<const double> x, std::span<double> y);

/// Symmetric cyclic tridiagonal matrix: diag[i] on the diagonal and off[i]
/// coupling rows i and i + 1 mod n. Factored once, solved many times
/// (Sherman-Morrison on top of the Thomas algorithm). Requires strict
/// diagonal dominance, which every caller guarantees by its shift.
class CyclicTridiagonal {
public:
  CyclicTridiagonal(std::vector<double> diag, std::vector<double> off);

  std::size_t size() const noexcept { return n_; }

  /// Overwrites rhs with the solution.
  void solve_in_place(std::span<double> rhs) const;

  /// Solves for `columns` contiguous right-hand sides of length size();
  /// columns are independent and distributed across threads.
  void solve_columns(std::span<double> block, std::size_t columns) const;
  void solve_columns_serial(std::span<double> block, std::size_t columns) const;

private:
  void thomas(std::span<double> rhs) const;

  std::size_t n_;
  std::vector<double> sub_;   // a_i, coupling to i - 1 (a_0 unused)
  std::vector<double> super_; // c_i, coupling to i + 1 (c_{n-1} unused)
  std::vector<double> cprime_;
  std::vector<double> denom_;
  std::vector<double> z_;     // A'^{-1} u
  double v_last_ = 0.0;       // v = (1, 0, ..., 0, v_last)
  double sm_denominator_ = 1.0;
};

} // namespace curvspec::kernels
