#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "curvspec/annulus_2d.hpp"
#include "curvspec/csv.hpp"
#include "curvspec/curve_geometry.hpp"
#include "curvspec/curve_optimizer.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/functional_e.hpp"
#include "curvspec/grid.hpp"
#include "curvspec/operator_1d.hpp"
#include "curvspec/shell_radial.hpp"

#ifndef CURVSPEC_VERSION
#define CURVSPEC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace curvspec;
using nlohmann::json;

namespace {

enum ExitCode { exit_ok = 0, exit_other = 1, exit_usage = 2, exit_numerical = 3, exit_validation = 4 };

struct Run {
  std::string command;
  fs::path out_dir;
  json params = json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path path = out_dir / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    body(out);
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
    outputs.push_back(path.generic_string());
  }

  void write_json(const std::string& name, const json& j) {
    write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

// --- circle-spectrum --------------------------------------------------------

struct CircleArgs {
  double g = 0.5;
  std::size_t n = 512;
  std::size_t k = 3;
};

void circle_spectrum(Run& run, const CircleArgs& a) {
  require(a.n >= min_operator_nodes, fmt::format("--N must be at least {}", min_operator_nodes));
  require(a.k >= 1 && a.k < a.n, "--k must lie in [1, N)");
  run.params = {{"g", a.g}, {"N", a.n}, {"k", a.k}};
  const OperatorSpec spec(make_circle(1.0, a.n), a.g);
  const auto result = ground_state(spec, a.n, a.k);
  run.write("circle_spectrum.csv", [&](std::ostream& o) {
    CsvWriter csv(o);
    csv.header({"index", "lambda", "continuum"});
    for (std::size_t i = 0; i < a.k; ++i) {
      const double m = static_cast<double>((i + 1) / 2);
      csv.field(i + 1).field(result.eigenvalues[i]).field(4.0 * pi * pi * (a.g + m * m)).end_row();
    }
  });
  run.write("circle_ground_state.csv", [&](std::ostream& o) { write_ground_state_csv(o, result); });
}

// --- stadium-sweep ----------------------------------------------------------

struct StadiumArgs {
  double g = 1.5;
  std::vector<double> eps{0.05, 0.1, 0.15, 0.2, 0.25};
  std::size_t n = 4000;
  double mollify = 0.01;
};

void stadium_sweep(Run& run, const StadiumArgs& a) {
  require(a.n >= min_operator_nodes, fmt::format("--N must be at least {}", min_operator_nodes));
  require(!a.eps.empty(), "--eps needs at least one value");
  require(a.mollify > 0.0, "--mollify must be positive");
  std::vector<CurvatureProfile> stadia;
  for (double e : a.eps) stadia.push_back(make_stadium(e, a.n));
  run.params = {{"g", a.g}, {"eps", a.eps}, {"N", a.n}, {"mollify", a.mollify}};

  run.write("stadium_sweep.csv", [&](std::ostream& o) {
    CsvWriter csv(o);
    csv.header({"eps", "lambda1", "rayleigh_bound", "circle_value", "lambda1_mollified"});
    for (std::size_t i = 0; i < stadia.size(); ++i) {
      const double lam = ground_state(OperatorSpec(stadia[i], a.g), a.n, 1).lambda1();
      const double smooth =
          ground_state(OperatorSpec(mollify(stadia[i], a.mollify), a.g), a.n, 1).lambda1();
      const double bound = std::pow(pi / (0.5 - a.eps[i]), 2);
      csv.field(a.eps[i]).field(lam).field(bound).field(4.0 * pi * pi * a.g).field(smooth).end_row();
    }
  });
}

// --- functional-minimize ----------------------------------------------------

struct FunctionalArgs {
  double g = 0.2;
  std::size_t n = 1024;
  int seeds = 20;
  std::uint64_t seed = 1;
  double tol = 1e-8;
};

void functional_minimize(Run& run, const FunctionalArgs& a) {
  require(a.g > 0.0, "--g must be positive");
  require(a.n >= CurvatureProfile::min_nodes, "--N too small");
  require(a.seeds >= 1, "--seeds must be at least 1");
  require(a.tol > 0.0, "--tol must be positive");
  run.params = {{"g", a.g}, {"N", a.n}, {"seeds", a.seeds}, {"seed", a.seed}, {"tol", a.tol}};
  run.seed = a.seed;

  std::vector<MinimizationReport> reports;
  for (int k = 0; k < a.seeds; ++k)
    reports.push_back(minimize_E(a.g, random_density(a.n, a.seed + static_cast<std::uint64_t>(k)), a.tol));
  std::size_t best = 0;
  for (std::size_t k = 1; k < reports.size(); ++k)
    if (reports[k].energy < reports[best].energy) best = k;
  const auto& r = reports[best];

  run.write("functional_restarts.csv", [&](std::ostream& o) {
    CsvWriter csv(o);
    csv.header({"seed", "energy", "euler_residual", "iterations", "converged"});
    for (std::size_t k = 0; k < reports.size(); ++k)
      csv.field(static_cast<std::int64_t>(a.seed + k))
          .field(reports[k].energy)
          .field(reports[k].euler_residual)
          .field(reports[k].iterations)
          .field(reports[k].converged)
          .end_row();
  });
  run.write("functional_trace.csv", [&](std::ostream& o) { write_trace_csv(o, r.trace); });
  const auto kappa = recover_kappa(r.minimizer);
  run.write("functional_minimizer.csv", [&](std::ostream& o) {
    CsvWriter csv(o);
    csv.header({"s", "zeta", "kappa"});
    for (std::size_t i = 0; i < a.n; ++i)
      csv.field(grid::node(i, a.n, 1.0)).field(r.minimizer[i]).field(kappa[i]).end_row();
  });
  json report = report_to_json(r);
  report["seed"] = a.seed + best;
  report["circle_value"] = 4.0 * pi * pi * a.g;
  if (r.energy <= pi * pi) {
    const auto floor = density_floor_check(r.minimizer, a.g);
    report["min_zeta"] = floor.min_zeta;
    report["min_zeta_bound"] = floor.bound;
  }
  run.write_json("functional_report.json", report);
}

// --- critical-g -------------------------------------------------------------

struct CriticalArgs {
  std::vector<double> g{0.1, 0.2, 0.25, 0.3, 0.5, 0.75, 1.0, 1.5};
  int modes = 8;
  int seeds = 10;
  std::uint64_t seed = 1;
  std::size_t n = 256;
  bool closure = false;
  double tol = circle_optimal_tol;
  int max_iter = 400;
};

void critical_g(Run& run, const CriticalArgs& a) {
  require(!a.g.empty(), "--g needs at least one value");
  require(a.seeds >= 1, "--seeds must be at least 1");
  OptimizationConfig config;
  config.n_modes = a.modes;
  config.n = a.n;
  config.seed = a.seed;
  config.enforce_closure = a.closure;
  config.max_iter = a.max_iter;
  run.params = {{"g", a.g},         {"modes", a.modes}, {"seeds", a.seeds},
                {"seed", a.seed},   {"N", a.n},         {"closure", a.closure},
                {"tol", a.tol},     {"max_iter", a.max_iter}};
  run.seed = a.seed;

  const auto scan = critical_g_scan(a.g, config, a.seeds, a.tol);
  run.write("critical_g.csv", [&](std::ostream& o) { write_scan_csv(o, scan); });
  run.write_json("critical_g.json", scan_to_json(scan));

  for (std::size_t i = 0; i < scan.rows.size(); i += static_cast<std::size_t>(a.seeds)) {
    const ScanRow* best = nullptr;
    for (int k = 0; k < a.seeds; ++k) {
      const ScanRow& r = scan.rows[i + static_cast<std::size_t>(k)];
      if (r.best_profile && (!best || r.best_lambda1 < best->best_lambda1)) best = &r;
    }
    if (best)
      run.write(fmt::format("profiles/best_g{}.txt", format_real(best->g)),
                [&](std::ostream& o) { write_profile_text(o, *best->best_profile); });
  }
}

// --- annulus-compare --------------------------------------------------------

struct AnnulusArgs {
  double d = 0.3;
  std::size_t ns = 128;
  std::size_t nr = 64;
  int seeds = 10;
  std::uint64_t seed = 1;
  int modes = 4;
  double amplitude = 1.0;
  std::string orientation = "inner";
};

void annulus_compare(Run& run, const AnnulusArgs& a) {
  require(a.seeds >= 1, "--seeds must be at least 1");
  require(a.amplitude >= 0.0, "--amplitude must be nonnegative");
  const auto orient = orientation_from_string(a.orientation);
  run.params = {{"d", a.d},         {"Ns", a.ns},     {"Nr", a.nr},
                {"seeds", a.seeds}, {"seed", a.seed}, {"modes", a.modes},
                {"amplitude", a.amplitude}, {"orientation", to_string(orient)}};
  run.seed = a.seed;

  const AnnularDomain circle(make_circle(two_pi, a.ns), a.d, orient);
  std::vector<AnnularDomain> domains;
  for (int k = 0; k < a.seeds; ++k) {
    const auto unit = closure_project(
        random_fourier_profile(a.modes, a.ns, a.seed + static_cast<std::uint64_t>(k), a.amplitude));
    domains.emplace_back(unit.rescaled(two_pi), a.d, orient);
  }

  const double lambda_circle = ground_state_2d(circle, a.ns, a.nr).lambda1;
  run.write("annulus_compare.csv", [&](std::ostream& o) {
    CsvWriter csv(o);
    csv.header({"seed", "sup_deviation", "lambda1", "lambda1_circle", "difference",
                "curvature_bound"});
    csv.field(std::int64_t{-1}).field(0.0).field(lambda_circle).field(lambda_circle).field(0.0)
        .field(curvature_lower_bound(circle, a.ns, a.nr).bound).end_row();
    for (std::size_t k = 0; k < domains.size(); ++k) {
      const double lam = ground_state_2d(domains[k], a.ns, a.nr).lambda1;
      csv.field(static_cast<std::int64_t>(a.seed + k))
          .field(sup_distance(domains[k].profile(), circle.profile()))
          .field(lam)
          .field(lambda_circle)
          .field(lambda_circle - lam)
          .field(curvature_lower_bound(domains[k], a.ns, a.nr).bound)
          .end_row();
    }
  });
}

// --- shell-sweep ------------------------------------------------------------

struct ShellArgs {
  double A0 = 4.0 * pi;
  double V = 0.8;
  std::vector<double> M0;
  std::size_t nr = 800;
};

void shell_sweep_cmd(Run& run, ShellArgs a) {
  if (a.M0.empty())
    for (int k = 0; k <= 8; ++k) a.M0.push_back((8.0 + 0.5 * k) * pi);
  run.params = {{"A0", a.A0}, {"V", a.V}, {"M0", a.M0}, {"Nr", a.nr}};
  const auto rows = shell_sweep(a.A0, a.V, a.M0, a.nr);
  run.write("shell_sweep.csv", [&](std::ostream& o) { write_shell_sweep_csv(o, rows); });
}

// --- bound-check ------------------------------------------------------------

struct BoundArgs {
  std::string domain = "circle";
  std::optional<double> d;
  std::size_t ns = 64;
  std::size_t nr = 64;
  std::string orientation = "inner";
};

void bound_check(Run& run, const BoundArgs& a) {
  std::optional<AnnularDomain> domain;
  if (a.domain == "circle") {
    domain.emplace(make_circle(two_pi, a.ns), a.d.value_or(0.5),
                   orientation_from_string(a.orientation));
  } else {
    std::ifstream in(a.domain);
    if (!in) throw ParameterError(fmt::format("cannot read domain file {}", a.domain));
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParameterError(fmt::format("domain file {}: {}", a.domain, e.what()));
    }
    if (a.d) j["d"] = *a.d;
    domain.emplace(domain_from_json(j));
  }
  run.params = {{"domain", a.domain}, {"Ns", a.ns}, {"Nr", a.nr},
                {"d", domain->thickness()}, {"orientation", to_string(domain->orientation())}};

  const auto bound = curvature_lower_bound(*domain, a.ns, a.nr);
  const double coarse = ground_state_2d(*domain, a.ns, a.nr).lambda1;
  const double fine = ground_state_2d(*domain, 2 * a.ns, 2 * a.nr).lambda1;
  const double margin = discretization_margin(coarse, fine);
  run.write("bound_check.csv", [&](std::ostream& o) {
    CsvWriter csv(o);
    csv.header({"Ns", "Nr", "lambda1", "lambda1_fine", "margin", "bound", "inf_q", "holds"});
    csv.field(a.ns).field(a.nr).field(coarse).field(fine).field(margin).field(bound.bound)
        .field(bound.inf_q).field(fine >= bound.bound - margin).end_row();
  });
  run.write_json("domain.json", domain_to_json(*domain));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature-dependent eigenvalue experiments"};
  app.set_version_flag("--version", CURVSPEC_VERSION);
  app.set_config("--config", "", "TOML/INI file with option values; flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory")->envname("CURVSPEC_OUT")->capture_default_str();

  CircleArgs circle;
  auto* c1 = app.add_subcommand("circle-spectrum", "Lowest eigenvalues on the circle");
  c1->add_option("--g", circle.g, "Coupling constant")->capture_default_str();
  c1->add_option("--N", circle.n, "Grid size")->capture_default_str();
  c1->add_option("--k", circle.k, "Number of eigenvalues")->capture_default_str();

  StadiumArgs stadium;
  auto* c2 = app.add_subcommand("stadium-sweep", "Ground state over stadium curves");
  c2->add_option("--g", stadium.g, "Coupling constant")->capture_default_str();
  c2->add_option("--eps", stadium.eps, "Arc widths")->delimiter(',')->capture_default_str();
  c2->add_option("--N", stadium.n, "Grid size")->capture_default_str();
  c2->add_option("--mollify", stadium.mollify, "Mollifier width")->capture_default_str();

  FunctionalArgs functional;
  auto* c3 = app.add_subcommand("functional-minimize", "Minimize the density functional");
  c3->add_option("--g", functional.g, "Coupling constant")->capture_default_str();
  c3->add_option("--N", functional.n, "Grid size")->capture_default_str();
  c3->add_option("--seeds", functional.seeds, "Number of random restarts")->capture_default_str();
  c3->add_option("--seed", functional.seed, "First seed")->capture_default_str();
  c3->add_option("--tol", functional.tol, "Residual tolerance")->capture_default_str();

  CriticalArgs critical;
  auto* c4 = app.add_subcommand("critical-g", "Scan for the coupling where the circle stops being optimal");
  c4->add_option("--g", critical.g, "Coupling values")->delimiter(',')->capture_default_str();
  c4->add_option("--modes", critical.modes, "Fourier modes")->capture_default_str();
  c4->add_option("--seeds", critical.seeds, "Restarts per g")->capture_default_str();
  c4->add_option("--seed", critical.seed, "First seed")->capture_default_str();
  c4->add_option("--N", critical.n, "Grid size")->capture_default_str();
  c4->add_flag("--closure", critical.closure, "Project onto closed curves after every step");
  c4->add_option("--tol", critical.tol, "Circle-optimality tolerance")->capture_default_str();
  c4->add_option("--max-iter", critical.max_iter, "Iteration cap per run")->capture_default_str();

  AnnulusArgs annulus;
  auto* c5 = app.add_subcommand("annulus-compare", "Perturbed annuli against the circular one");
  c5->add_option("--d", annulus.d, "Thickness")->capture_default_str();
  c5->add_option("--Ns", annulus.ns, "Grid size along the edge")->capture_default_str();
  c5->add_option("--Nr", annulus.nr, "Grid size across")->capture_default_str();
  c5->add_option("--seeds", annulus.seeds, "Number of perturbations")->capture_default_str();
  c5->add_option("--seed", annulus.seed, "First seed")->capture_default_str();
  c5->add_option("--modes", annulus.modes, "Fourier modes of the perturbation")->capture_default_str();
  c5->add_option("--amplitude", annulus.amplitude, "Perturbation amplitude")->capture_default_str();
  c5->add_option("--orientation", annulus.orientation, "inner or outer")->capture_default_str();

  ShellArgs shell;
  auto* c6 = app.add_subcommand("shell-sweep", "Reduced shell eigenvalue over total mean curvature");
  c6->add_option("--A0", shell.A0, "Edge area")->capture_default_str();
  c6->add_option("--V", shell.V, "Shell volume")->capture_default_str();
  c6->add_option("--M0", shell.M0, "Total mean curvature values (default 8pi..12pi)")->delimiter(',');
  c6->add_option("--Nr", shell.nr, "Radial intervals")->capture_default_str();

  BoundArgs bound;
  auto* c7 = app.add_subcommand("bound-check", "Curvature lower bound against the computed eigenvalue");
  c7->add_option("--domain", bound.domain, "Domain JSON file or 'circle'")->capture_default_str();
  c7->add_option("--d", bound.d, "Thickness (overrides the domain file)");
  c7->add_option("--Ns", bound.ns, "Grid size along the edge")->capture_default_str();
  c7->add_option("--Nr", bound.nr, "Grid size across")->capture_default_str();
  c7->add_option("--orientation", bound.orientation, "inner or outer")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  Run run;
  run.out_dir = out_dir;
  const auto started = std::chrono::steady_clock::now();
  try {
    if (c1->parsed()) {
      run.command = c1->get_name();
      circle_spectrum(run, circle);
    } else if (c2->parsed()) {
      run.command = c2->get_name();
      stadium_sweep(run, stadium);
    } else if (c3->parsed()) {
      run.command = c3->get_name();
      functional_minimize(run, functional);
    } else if (c4->parsed()) {
      run.command = c4->get_name();
      critical_g(run, critical);
    } else if (c5->parsed()) {
      run.command = c5->get_name();
      annulus_compare(run, annulus);
    } else if (c6->parsed()) {
      run.command = c6->get_name();
      shell_sweep_cmd(run, shell);
    } else if (c7->parsed()) {
      run.command = c7->get_name();
      bound_check(run, bound);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json record{{"command", run.command},   {"parameters", run.params},
                {"seed", run.seed},         {"version", CURVSPEC_VERSION},
                {"wall_time_s", wall},      {"outputs", run.outputs}};
    const fs::path sidecar = fs::path(out_dir) / (run.command + ".run.json");
    std::ofstream(sidecar, std::ios::binary) << record.dump(2) << '\n';
    for (const auto& path : run.outputs) std::cout << path << '\n';
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return exit_validation;
  } catch (const GeometryError& e) {
    std::cerr << "inadmissible geometry: " << e.what() << '\n';
    return exit_validation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_other;
  }
  return exit_ok;
}
