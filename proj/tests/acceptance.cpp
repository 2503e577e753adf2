// One line per acceptance criterion; exit status is nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "curvspec/annulus_2d.hpp"
#include "curvspec/curve_geometry.hpp"
#include "curvspec/curve_optimizer.hpp"
#include "curvspec/functional_e.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/operator_1d.hpp"
#include "curvspec/shell_radial.hpp"
#include "oracles.hpp"

using namespace curvspec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("threw: {}", e.what())};
  }
  if (!o.pass) ++failures;
  fmt::print("[{}] {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail);
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double lambda1(const CurvatureProfile& p, double g, std::size_t n) {
  return ground_state(OperatorSpec(p, g), n, 1).lambda1();
}

double sup_from(const CurvatureProfile& p, double value) {
  double m = 0.0;
  for (double k : p.samples()) m = std::max(m, std::abs(k - value));
  return m;
}

// Fermi map of the arc with constant curvature k0 (tangent angle k0 s),
// offset away from the center for the inner orientation. Evaluated in
// extended precision so the difference quotients stay well below 1e-8.
using ld = long double;

struct ArcMap {
  ld k0;
  Orientation o;
  ld x(ld s, ld r) const {
    const ld t = k0 * s;
    const ld gx = std::abs(k0) < 1e-14L ? s : std::sin(t) / k0;
    return gx + static_cast<ld>(orientation_sign(o)) * r * std::sin(t);
  }
  ld y(ld s, ld r) const {
    const ld t = k0 * s;
    const ld gy = std::abs(k0) < 1e-14L ? 0.0L : (1.0L - std::cos(t)) / k0;
    return gy - static_cast<ld>(orientation_sign(o)) * r * std::cos(t);
  }
};

// Fourth-order central differences.
ld d1(const std::function<ld(ld)>& f, ld t, ld h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}
ld d2(const std::function<ld(ld)>& f, ld t, ld h) {
  return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + CURVSPEC_CLI + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

int main() {
  report(1, "circle spectrum", [] {
    double worst = 0.0;
    for (double g : {0.1, 0.25, 0.5, 1.0, 1.5})
      worst = std::max(worst, rel(lambda1(make_circle(1.0, 512), g, 512), 4.0 * pi * pi * g));
    return Outcome{worst <= 1e-6, fmt::format("max rel err {:.2e} (tol 1e-6)", worst)};
  });

  report(2, "circle optimal below the threshold", [] {
    const double g = 0.2, floor = 4.0 * pi * pi * g - 5e-3;
    double lowest = 1e300;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const int modes = 1 + static_cast<int>(seed % 8);
      lowest = std::min(lowest, lambda1(random_fourier_profile(modes, 256, 1000 + seed), g, 256));
    }
    OptimizationConfig cfg;
    cfg.g = g;
    double worst_sup = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      cfg.seed = seed;
      const auto t = minimize_lambda1(cfg, random_fourier_profile(cfg.n_modes, cfg.n, seed));
      worst_sup = std::max(worst_sup, sup_from(t.best_profile, two_pi));
    }
    return Outcome{lowest >= floor && worst_sup <= 1e-2,
                   fmt::format("min lambda1 {:.6f} >= {:.6f}; optimizer sup|kappa - 2pi| {:.2e} (tol 1e-2)",
                               lowest, floor, worst_sup)};
  });

  report(3, "stadium beats the circle above the threshold", [] {
    const double lam = lambda1(make_stadium(0.05, 4000), 1.5, 4000);
    const double circle = 4.0 * pi * pi * 1.5, trial = std::pow(pi / 0.45, 2);
    return Outcome{lam < circle && lam <= trial + 0.5,
                   fmt::format("lambda1 {:.4f} < {:.4f} and <= {:.4f} + 0.5", lam, circle, trial)};
  });

  report(4, "functional consistency", [] {
    const double g = 0.2, target = 4.0 * pi * pi * g;
    double best = 1e300, residual = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto r = minimize_E(g, random_density(1024, seed));
      if (r.energy < best) {
        best = r.energy;
        residual = euler_residual(r.minimizer, g).residual_norm;
      }
    }
    OptimizationConfig cfg;
    cfg.g = g;
    double curve_best = 1e300;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      cfg.seed = seed;
      curve_best = std::min(curve_best,
                            minimize_lambda1(cfg, random_fourier_profile(cfg.n_modes, cfg.n, seed)).best_lambda1);
    }
    const double err = std::abs(best - target), agree = std::abs(best - curve_best);
    return Outcome{err <= 1e-4 && residual <= 1e-6 && agree <= 1e-3,
                   fmt::format("min E err {:.2e} (tol 1e-4), Euler residual {:.2e} (tol 1e-6), "
                               "curve-space gap {:.2e} (tol 1e-3)",
                               err, residual, agree)};
  });

  report(5, "density floor on random admissible densities", [] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coupling(0.0, 0.25);
    std::uniform_real_distribution<double> amp(0.05, 1.5);
    int tested = 0, violations = 0;
    for (std::uint64_t seed = 1; tested < 1000; ++seed) {
      const auto z = random_density(256, seed, 6, amp(rng));
      const double E = evaluate_E(z, coupling(rng));
      if (E > pi * pi) continue;
      ++tested;
      const double mn = *std::min_element(z.samples().begin(), z.samples().end());
      if (!(mn > 1.0 - std::sqrt(E) / pi)) ++violations;
    }
    return Outcome{violations == 0, fmt::format("{} densities, {} violations", tested, violations)};
  });

  report(6, "first integral of explicit solutions", [] {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> lam_dist(1.0, 12.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double lam = lam_dist(rng), M = frac(rng) * lam;
      worst = std::max(worst, first_integral_residual(explicit_solution(M, lam, frac(rng), 4096), M, lam));
    }
    return Outcome{worst <= 1e-6, fmt::format("max residual {:.2e} (tol 1e-6)", worst)};
  });

  report(7, "Hellmann-Feynman gradients", [] {
    const std::size_t n = 512;
    const double h = 1e-4;
    double worst_g = 0.0, worst_k = 0.0;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto p = random_fourier_profile(6, n, 700 + seed, 0.8);
      const double g = 0.2 + 0.15 * static_cast<double>(seed);
      const OperatorSpec spec(p, g);
      const auto gs = ground_state(spec, n, 1);
      const double fd_g = (lambda1(p, g + h, n) - lambda1(p, g - h, n)) / (2.0 * h);
      worst_g = std::max(worst_g, rel(hf_gradient_g(spec, gs).value, fd_g));

      std::vector<double> dk(n);
      const double a = normal(rng), b = normal(rng), c = normal(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = grid::node(i, n, 1.0);
        dk[i] = a * std::cos(two_pi * s) + b * std::sin(2.0 * two_pi * s) + c * std::cos(3.0 * two_pi * s);
      }
      auto at = [&](double t) {
        std::vector<double> k(p.samples().begin(), p.samples().end());
        for (std::size_t i = 0; i < n; ++i) k[i] += t * dk[i];
        return lambda1(CurvatureProfile(k, 1.0), g, n);
      };
      const double fd_k = (at(h) - at(-h)) / (2.0 * h);
      worst_k = std::max(worst_k, rel(grid::inner(hf_gradient_kappa(spec, gs).value, dk, 1.0), fd_k));
    }
    return Outcome{worst_g <= 1e-5 && worst_k <= 1e-4,
                   fmt::format("g: max rel {:.2e} (tol 1e-5), kappa: max rel {:.2e} (tol 1e-4)", worst_g,
                               worst_k)};
  });

  report(8, "circular annulus maximizes", [] {
    const std::size_t ns = 128, nr = 64;
    const double d = 0.3;
    int strict = 0, bad = 0;
    double worst_excess = -1e300;
    for (auto o : {Orientation::edge_is_inner, Orientation::edge_is_outer}) {
      const double circle = ground_state_2d(AnnularDomain(make_circle(two_pi, ns), d, o), ns, nr).lambda1;
      for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto p = closure_project(random_fourier_profile(4, ns, seed, 1.0)).rescaled(two_pi);
        const double lam = ground_state_2d(AnnularDomain(p, d, o), ns, nr).lambda1;
        worst_excess = std::max(worst_excess, lam - circle);
        if (lam > circle + 1e-3) ++bad;
        if (sup_from(p, 1.0) >= 0.2) {
          ++strict;
          if (!(lam <= circle - 1e-3)) ++bad;
        }
      }
    }
    return Outcome{bad == 0, fmt::format("50 perturbations, max lambda1 - circle {:.2e}, {} with "
                                         "sup|kappa - 1| >= 0.2, {} violations",
                                         worst_excess, strict, bad)};
  });

  report(9, "curvature lower bound", [] {
    std::vector<AnnularDomain> domains;
    for (auto o : {Orientation::edge_is_inner, Orientation::edge_is_outer}) {
      domains.emplace_back(make_circle(two_pi, 64), 0.5, o);
      domains.emplace_back(make_circle(two_pi, 64), 0.3, o);
      for (std::uint64_t seed : {3, 7, 21})
        domains.emplace_back(closure_project(random_fourier_profile(4, 64, seed, 1.0)).rescaled(two_pi), 0.3, o);
    }
    int violations = 0;
    double min_slack = 1e300, min_ratio = 1e300, max_ratio = 0.0;
    for (const auto& dom : domains) {
      std::vector<double> lam;
      for (std::size_t n : {32, 64, 128}) lam.push_back(ground_state_2d(dom, 2 * n, n).lambda1);
      const double margin = discretization_margin(lam[1], lam[2]);
      const double bound = curvature_lower_bound(dom, 256, 128).bound;
      min_slack = std::min(min_slack, lam[2] - (bound - margin));
      if (lam[2] < bound - margin) ++violations;
      const double ratio = discretization_margin(lam[0], lam[1]) / margin;
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
    }
    const bool second_order = min_ratio >= 3.5 && max_ratio <= 4.5;
    return Outcome{violations == 0 && second_order,
                   fmt::format("{} domains, {} violations, min slack {:.4f}, margin ratio per doubling "
                               "in [{:.3f}, {:.3f}] (expect 4)",
                               domains.size(), violations, min_slack, min_ratio, max_ratio)};
  });

  report(10, "rotational reduction", [] {
    double worst = 0.0;
    for (auto o : {Orientation::edge_is_inner, Orientation::edge_is_outer}) {
      const double two_d = ground_state_2d(AnnularDomain(make_circle(two_pi, 128), 0.3, o), 128, 256).lambda1;
      const double sign = orientation_sign(o);
      const double qr = oracle::radial_tridiagonal_qr([sign](double r) { return 1.0 + sign * r; }, 0.3, 256);
      worst = std::max({worst, rel(two_d, radial_annulus_oracle(0.3, o, 256)), rel(two_d, qr)});
    }
    return Outcome{worst <= 1e-4, fmt::format("max rel err {:.2e} (tol 1e-4)", worst)};
  });

  report(11, "shell reduction", [] {
    const double A0 = 4.0 * pi, V = 0.8;
    const auto sphere = ShellProfile::sphere(A0, V);
    const double d = sphere.thickness();
    const double err = rel(reduced_ground_state(sphere, 4096), pi * pi / (d * d));
    std::vector<double> m0;
    for (int k = 0; k <= 8; ++k) m0.push_back((8.0 + 0.5 * k) * pi);
    const auto rows = shell_sweep(A0, V, m0, 800);
    const auto best = std::max_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.lambda1 < b.lambda1; });
    int violations = 0;
    for (std::size_t k = 1; k < m0.size(); ++k) {
      const auto vc = variable_change(ShellProfile(A0, m0[k], V), 800);
      for (std::size_t j = 0; j < vc.r.size(); ++j)
        if (vc.rprime[j] > vc.r[j] || vc.ratio[j] > 1.0) ++violations;
    }
    return Outcome{err <= 1e-4 && best->M0 == m0.front() && violations == 0,
                   fmt::format("sphere rel err {:.2e} (tol 1e-4), sweep max at M0 = {:.4f} pi, {} "
                               "variable-change violations",
                               err, best->M0 / pi, violations)};
  });

  report(12, "growth factor and level curvature", [] {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> kappa(-2.0, 2.0), frac(0.0, 0.9), arc(-1.0, 1.0);
    const ld h = 1e-3L;
    double worst = 0.0;
    for (int k = 0; k < 40; ++k) {
      for (auto o : {Orientation::edge_is_inner, Orientation::edge_is_outer}) {
        const double k0 = kappa(rng);
        const ArcMap m{k0, o};
        const double r = frac(rng) / std::max(1.0, std::abs(k0)), s = arc(rng);
        const ld xs = d1([&](ld t) { return m.x(t, r); }, s, h);
        const ld ys = d1([&](ld t) { return m.y(t, r); }, s, h);
        const ld xr = d1([&](ld t) { return m.x(s, t); }, r, h);
        const ld yr = d1([&](ld t) { return m.y(s, t); }, r, h);
        const ld xss = d2([&](ld t) { return m.x(t, r); }, s, h);
        const ld yss = d2([&](ld t) { return m.y(t, r); }, s, h);
        const auto jac = static_cast<double>(std::abs(xs * yr - ys * xr));
        const auto curv = static_cast<double>((xs * yss - ys * xss) / std::pow(xs * xs + ys * ys, 1.5L));
        worst = std::max({worst, std::abs(jac - growth_factor(k0, r, o)),
                          std::abs(curv - level_curvature(k0, r, o))});
      }
    }
    return Outcome{worst <= 1e-8, fmt::format("80 samples, max abs err {:.2e} (tol 1e-8)", worst)};
  });

  report(13, "deterministic CLI output", [] {
    const fs::path root = fs::temp_directory_path() / "curvspec_acceptance";
    fs::remove_all(root);
    const std::vector<std::string> commands{
        "circle-spectrum --g 0.7 --N 256",
        "stadium-sweep --eps 0.05,0.1 --N 1000",
        "functional-minimize --N 256 --seeds 3",
        "critical-g --g 0.2,1.5 --seeds 2 --modes 4 --N 128 --max-iter 60",
        "annulus-compare --Ns 64 --Nr 32 --seeds 4",
        "shell-sweep --Nr 256",
        "bound-check --Ns 32 --Nr 32",
    };
    int files = 0, differing = 0, failed = 0;
    for (std::size_t k = 0; k < commands.size(); ++k) {
      const fs::path a = root / fmt::format("{}a", k), b = root / fmt::format("{}b", k);
      if (run_cli(commands[k] + " --out " + a.string()) != 0 || run_cli(commands[k] + " --out " + b.string()) != 0) {
        ++failed;
        continue;
      }
      for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        if (oracle::slurp(entry.path().string()) != oracle::slurp((b / fs::relative(entry.path(), a)).string()))
          ++differing;
      }
    }
    fs::remove_all(root);
    return Outcome{failed == 0 && differing == 0 && files > 0,
                   fmt::format("{} commands, {} CSV files compared, {} differ, {} runs failed", commands.size(),
                               files, differing, failed)};
  });

  fmt::print("{} of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
