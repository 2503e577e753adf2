#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvspec/curve_geometry.hpp"
#include "curvspec/errors.hpp"
#include "curvspec/grid.hpp"

using namespace curvspec;

namespace {

double max_radius_error(const PlanarCurve& c, Point2 center, double radius) {
  double worst = 0.0;
  for (const auto& p : c.positions)
    worst = std::max(worst, std::abs(std::hypot(p.x - center.x, p.y - center.y) - radius));
  return worst;
}

} // namespace

TEST_CASE("circle profiles are constant with full winding") {
  const auto unit = make_circle(1.0, 64);
  CHECK(unit.size() == 64);
  for (double k : unit.samples()) CHECK(k == doctest::Approx(two_pi).epsilon(1e-15));
  CHECK(unit.winding_integral() == doctest::Approx(two_pi).epsilon(1e-15));
  CHECK(unit.has_full_winding());

  const auto big = make_circle(two_pi, 128);
  for (double k : big.samples()) CHECK(k == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invalid grids and lengths are rejected") {
  CHECK_THROWS_AS(make_circle(1.0, 8), ParameterError);
  CHECK_THROWS_AS(make_circle(0.0, 64), ParameterError);
  CHECK_THROWS_AS(make_circle(-1.0, 64), ParameterError);
  CHECK_THROWS_AS(CurvatureProfile(std::vector<double>(32, NAN), 1.0), ParameterError);
}

TEST_CASE("reconstructed circle closes and lies on its circle") {
  const auto c1 = reconstruct(make_circle(1.0, 256));
  CHECK(closure_report(c1).gap <= 1e-4);

  const auto c512 = reconstruct(make_circle(1.0, 512));
  // First point at the origin with tangent along x: center at (0, R).
  const double r = 1.0 / two_pi;
  CHECK(max_radius_error(c512, {0.0, r}, r) <= 1e-4);

  double last = 1.0;
  for (std::size_t n : {64, 128, 256, 512}) {
    const auto c = reconstruct(make_circle(two_pi, n));
    const double err = max_radius_error(c, {0.0, 1.0}, 1.0);
    CHECK(err <= 10.0 / static_cast<double>(n * n));
    CHECK(err < last);
    last = err;
    const auto report = closure_report(c);
    CHECK(report.winding == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(report.closed);
  }
}

TEST_CASE("stadium profile matches its definition") {
  const auto st = make_stadium(0.25, 400);
  CHECK(st.kind() == ProfileKind::piecewise_constant);
  const auto arc = std::count_if(st.samples().begin(), st.samples().end(),
                                 [](double k) { return std::abs(k - 4.0 * pi) < 1e-12; });
  const auto flat = std::count(st.samples().begin(), st.samples().end(), 0.0);
  CHECK(arc == 200);
  CHECK(flat == 200);
  CHECK(st.winding_integral() == doctest::Approx(two_pi).epsilon(1e-14));

  const auto wide = make_stadium(0.49, 1000);
  const auto on_arc = std::count_if(wide.samples().begin(), wide.samples().end(),
                                    [](double k) { return k > 0.0; });
  CHECK(on_arc == 980);
  CHECK(*std::max_element(wide.samples().begin(), wide.samples().end()) ==
        doctest::Approx(two_pi / 0.98).epsilon(1e-12));

  CHECK(closure_report(reconstruct(make_stadium(0.1, 1000))).gap <= 2e-2);

  CHECK_THROWS_AS(make_stadium(0.0, 400), ParameterError);
  CHECK_THROWS_AS(make_stadium(0.5, 400), ParameterError);
  CHECK_THROWS_AS(make_stadium(-0.1, 400), ParameterError);
}

TEST_CASE("stadium straight segments reconstruct collinear") {
  const auto c = reconstruct(make_stadium(0.1, 1000));
  // s in [0, 0.4] is straight and starts with tangent angle 0.
  for (std::size_t j = 0; j <= 400; ++j) {
    CHECK(c.tangent_angle[j] == 0.0);
    CHECK(c.positions[j].y == 0.0);
  }
}

TEST_CASE("fourier profiles pin the mean") {
  const auto empty = make_fourier_profile({}, 1.0, 64);
  CHECK(sup_distance(empty, make_circle(1.0, 64)) == 0.0);

  const std::vector<FourierMode> one{{0.5, 0.0}};
  const auto p = make_fourier_profile(one, 1.0, 128);
  for (std::size_t i = 0; i < 128; ++i)
    CHECK(p[i] == doctest::Approx(two_pi + 0.5 * std::cos(two_pi * grid::node(i, 128, 1.0)))
                      .epsilon(1e-14));
  CHECK(p.winding_integral() == doctest::Approx(two_pi).epsilon(1e-15));

  const std::vector<FourierMode> many{{1.3, -0.7}, {0.2, 2.1}, {-3.0, 0.4}, {0.05, 0.9}};
  for (double length : {1.0, two_pi, 3.7}) {
    const auto q = make_fourier_profile(many, length, 64);
    CHECK(std::abs(q.winding_integral() - two_pi) <= 1e-13);
  }
  CHECK_THROWS_AS(make_fourier_profile(many, 1.0, 15), ParameterError);
}

TEST_CASE("cyclic shift leaves the winding integral unchanged") {
  const std::vector<FourierMode> modes{{0.8, 0.1}, {0.3, -0.5}};
  const auto p = make_fourier_profile(modes, 1.0, 96);
  for (std::ptrdiff_t k : {1, 7, -13, 96}) {
    const auto q = p.shifted(k);
    CHECK(std::abs(q.winding_integral() - p.winding_integral()) <= 1e-14);
    CHECK(q[0] == p[static_cast<std::size_t>((k % 96 + 96) % 96)]);
  }
}

TEST_CASE("closure projection") {
  const auto circle = make_circle(1.0, 256);
  CHECK(sup_distance(closure_project(circle), circle) == 0.0);

  const std::vector<FourierMode> modes{{0.0, 0.0}, {0.3, 0.0}};
  const auto raw = make_fourier_profile(modes, 1.0, 256);
  const auto closed = closure_project(raw);
  const auto report = closure_report(reconstruct(closed), 1e-8);
  CHECK(report.gap <= 1e-8);
  CHECK(report.winding == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(report.closed);

  const std::vector<FourierMode> rough{{2.0, 1.0}, {-1.0, 0.5}, {0.7, 0.7}};
  const auto once = closure_project(make_fourier_profile(rough, 1.0, 256));
  CHECK(closure_report(reconstruct(once)).gap <= 1e-10);
  const auto twice = closure_project(once);
  CHECK(sup_distance(once, twice) <= 1e-9);
  CHECK(std::abs(once.winding_integral() - two_pi) <= 1e-12);

  std::vector<double> bad(64, 1.0);
  CHECK_THROWS_AS(closure_project(CurvatureProfile(bad, 1.0)), ParameterError);
}

TEST_CASE("resampling") {
  const std::vector<FourierMode> modes{{0.9, -0.2}, {0.0, 0.6}, {0.3, 0.0}};
  const auto coarse = make_fourier_profile(modes, 1.0, 64);
  const auto fine = coarse.resampled(256);
  const auto direct = make_fourier_profile(modes, 1.0, 256);
  CHECK(sup_distance(fine, direct) <= 1e-12);
  CHECK(sup_distance(fine.resampled(64), coarse) <= 1e-12);

  const auto st = make_stadium(0.05, 4000);
  const auto st_coarse = st.resampled(1000);
  CHECK(st_coarse.kind() == ProfileKind::piecewise_constant);
  CHECK(st_coarse.winding_integral() == doctest::Approx(two_pi).epsilon(1e-13));
}

TEST_CASE("rescaling changes curvature inversely") {
  const auto p = make_circle(1.0, 64).rescaled(two_pi);
  CHECK(p.length() == two_pi);
  CHECK(p[5] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.winding_integral() == doctest::Approx(two_pi).epsilon(1e-15));
}

TEST_CASE("mollifier keeps the winding integral") {
  const auto st = make_stadium(0.1, 1000);
  const auto smooth = mollify(st, 0.01);
  CHECK(smooth.kind() == ProfileKind::smooth);
  CHECK(smooth.winding_integral() == doctest::Approx(two_pi).epsilon(1e-12));
  CHECK(smooth.max_abs() < st.max_abs());
  CHECK_THROWS_AS(mollify(st, 0.0), ParameterError);
}

TEST_CASE("text and json round trips") {
  const std::vector<FourierMode> modes{{0.4, 0.1}};
  const auto p = make_fourier_profile(modes, 1.0, 32);
  std::stringstream text;
  write_profile_text(text, p);
  const auto back = read_profile_text(text);
  CHECK(back.size() == p.size());
  CHECK(back.length() == p.length());
  CHECK(sup_distance(back, p) == 0.0);

  const auto j = profile_to_json(make_stadium(0.2, 64));
  const auto from = profile_from_json(j);
  CHECK(from.kind() == ProfileKind::piecewise_constant);
  CHECK(sup_distance(from, make_stadium(0.2, 64)) == 0.0);

  std::stringstream broken("1.0\n40\n1\n2\n");
  CHECK_THROWS_AS(read_profile_text(broken), ParameterError);
}
