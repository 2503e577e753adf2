#include "curvspec/kernels.hpp"

#include <cmath>

#include "curvspec/errors.hpp"

namespace curvspec::kernels {

namespace {

inline void schrodinger_row(std::span<const double> potential, double inv_h2,
                            std::span<const double> x, std::span<double> y, std::size_t i,
                            std::size_t n) {
  const double left = x[i == 0 ? n - 1 : i - 1];
  const double right = x[i + 1 == n ? 0 : i + 1];
  y[i] = (2.0 * x[i] - left - right) * inv_h2 + potential[i] * x[i];
}

inline void fermi_row(const FermiStencil& st, std::span<const double> x, std::span<double> y,
                      std::size_t i) {
  const std::size_t ns = st.ns;
  const std::size_t nr = st.nr;
  const std::size_t prev = i == 0 ? ns - 1 : i - 1;
  const std::size_t next = i + 1 == ns ? 0 : i + 1;
  for (std::size_t j = 0; j < nr; ++j) {
    const std::size_t k = i * nr + j;
    const double xc = x[k];
    double acc = st.s_face[k] * (xc - x[next * nr + j]) +
                 st.s_face[prev * nr + j] * (xc - x[prev * nr + j]);
    const double below = j == 0 ? 0.0 : x[k - 1];
    const double above = j + 1 == nr ? 0.0 : x[k + 1];
    acc += st.r_face[i * (nr + 1) + j] * (xc - below);
    acc += st.r_face[i * (nr + 1) + j + 1] * (xc - above);
    y[k] = acc;
  }
}

} // namespace

void apply_periodic_schrodinger(std::span<const double> potential, double h,
                                std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const double inv_h2 = 1.0 / (h * h);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i)
    schrodinger_row(potential, inv_h2, x, y, static_cast<std::size_t>(i), n);
}

void apply_periodic_schrodinger_serial(std::span<const double> potential, double h,
                                       std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) schrodinger_row(potential, inv_h2, x, y, i, n);
}

void apply_fermi_stiffness(const FermiStencil& stencil, std::span<const double> x,
                           std::span<double> y) {
  const auto ns = static_cast<std::ptrdiff_t>(stencil.ns);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ns; ++i) fermi_row(stencil, x, y, static_cast<std::size_t>(i));
}

void apply_fermi_stiffness_serial(const FermiStencil& stencil, std::span<const double> x,
                                  std::span<double> y) {
  for (std::size_t i = 0; i < stencil.ns; ++i) fermi_row(stencil, x, y, i);
}

void apply_diagonal(std::span<const double> diag, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = diag[i] * x[i];
}

CyclicTridiagonal::CyclicTridiagonal(std::vector<double> diag, std::vector<double> off)
    : n_(diag.size()) {
  if (n_ < 3 || off.size() != n_)
    throw ParameterError("cyclic tridiagonal system needs n >= 3 and matching off-diagonal");

  const double gamma = -diag[0];
  const double corner = off[n_ - 1];
  std::vector<double> modified = diag;
  modified[0] = diag[0] - gamma;
  modified[n_ - 1] = diag[n_ - 1] - corner * corner / gamma;

  sub_.assign(n_, 0.0);
  super_.assign(n_, 0.0);
  for (std::size_t i = 0; i + 1 < n_; ++i) {
    super_[i] = off[i];
    sub_[i + 1] = off[i];
  }

  cprime_.assign(n_, 0.0);
  denom_.assign(n_, 0.0);
  denom_[0] = modified[0];
  cprime_[0] = super_[0] / denom_[0];
  for (std::size_t i = 1; i < n_; ++i) {
    denom_[i] = modified[i] - sub_[i] * cprime_[i - 1];
    if (denom_[i] == 0.0 || !std::isfinite(denom_[i]))
      throw NumericalError("cyclic tridiagonal factorization broke down");
    cprime_[i] = super_[i] / denom_[i];
  }

  z_.assign(n_, 0.0);
  z_[0] = gamma;
  z_[n_ - 1] = corner;
  thomas(z_);
  v_last_ = corner / gamma;
  sm_denominator_ = 1.0 + z_[0] + v_last_ * z_[n_ - 1];
  if (sm_denominator_ == 0.0) throw NumericalError("cyclic tridiagonal system is singular");
}

void CyclicTridiagonal::thomas(std::span<double> d) const {
  d[0] /= denom_[0];
  for (std::size_t i = 1; i < n_; ++i) d[i] = (d[i] - sub_[i] * d[i - 1]) / denom_[i];
  for (std::size_t i = n_ - 1; i-- > 0;) d[i] -= cprime_[i] * d[i + 1];
}

void CyclicTridiagonal::solve_in_place(std::span<double> rhs) const {
  thomas(rhs);
  const double factor = (rhs[0] + v_last_ * rhs[n_ - 1]) / sm_denominator_;
  for (std::size_t i = 0; i < n_; ++i) rhs[i] -= factor * z_[i];
}

void CyclicTridiagonal::solve_columns(std::span<double> block, std::size_t columns) const {
  const auto nc = static_cast<std::ptrdiff_t>(columns);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nc; ++c)
    solve_in_place(block.subspan(static_cast<std::size_t>(c) * n_, n_));
}

void CyclicTridiagonal::solve_columns_serial(std::span<double> block, std::size_t columns) const {
  for (std::size_t c = 0; c < columns; ++c) solve_in_place(block.subspan(c * n_, n_));
}

} // namespace curvspec::kernels
