#include <cmath>
#include <numbers>

#include "afg/hypersurface.hpp"
#include "doctest.h"

using namespace afg;

namespace {

constexpr double kPi = std::numbers::pi;

GraphManifold make(const std::string& kind, std::map<std::string, double> params, double spacing, double r_max,
                   double hole = 0.0, int n = 3) {
  ProfileSpec s;
  s.kind = kind;
  s.params = std::move(params);
  auto p = Profile::make(n, s);
  return GraphManifold::from_profile(GraphDomain::make(n, spacing, r_max, hole), p, ClassParameters{});
}

std::size_t node_at(const GraphDomain& d, Vec x) {
  Index k{};
  for (int a = 0; a < d.dim; ++a) k[a] = static_cast<int>(std::lround(x[a] / d.spacing));
  return d.linear(k);
}

}  // namespace

TEST_CASE("finite differences are exact on quadratics") {
  auto g = make("paraboloid", {{"curvature", 1.0}}, 0.25, 2.0);
  const GraphDomain& d = g.domain();
  for (Vec x : {Vec{0.5, -0.25, 1.0, 0}, Vec{2.0, 2.0, -2.0, 0}, Vec{-2.0, 0.0, 1.75, 0}}) {
    const Differentials dd = differentials(g, node_at(d, x), DerivativeMode::FiniteDifference);
    for (int i = 0; i < 3; ++i) {
      CHECK(dd.gradient[i] == doctest::Approx(x[i]).epsilon(1e-12).scale(1.0));
      for (int j = 0; j < 3; ++j) CHECK(dd.h(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
    }
  }
  auto flat = make("flat", {{"height", 3.0}}, 0.5, 1.0);
  const Differentials z = differentials(flat, 0, DerivativeMode::FiniteDifference);
  for (int i = 0; i < 3; ++i) CHECK(z.gradient[i] == 0.0);
}

TEST_CASE("schwarzschild gradient at (5,0,0)") {
  auto g = make("schwarzschild", {{"mass", 1.0}}, 0.05, 6.0, 2.0);
  const std::size_t node = node_at(g.domain(), Vec{5.0, 0.0, 0.0, 0.0});
  const double oracle = 4.0 / std::sqrt(24.0);
  CHECK(differentials(g, node).gradient[0] == doctest::Approx(oracle));
  CHECK(differentials(g, node, DerivativeMode::FiniteDifference).gradient[0] == doctest::Approx(oracle).epsilon(1e-4));
  CHECK_THROWS_AS(differentials(g, node_at(g.domain(), Vec{0, 0, 0, 0})), ValidationError);
}

TEST_CASE("scalar curvature: affine vanishes, hemisphere is 6") {
  auto affine = make("affine", {{"a0", 0.4}, {"a1", -1.0}, {"a2", 2.0}}, 0.1, 1.0);
  auto field = scalar_curvature_field(affine, DerivativeMode::FiniteDifference);
  for (double v : field.values)
    if (!std::isnan(v)) CHECK(std::abs(v) < 1e-9);
  CHECK(field.evaluated > 0);

  auto hemi = make("hemisphere", {{"radius", 1.0}}, 0.02, 0.56);
  auto hf = scalar_curvature_field(hemi, DerivativeMode::FiniteDifference, 0.0, 0.5);
  double worst = 0.0;
  for (double v : hf.values)
    if (!std::isnan(v)) worst = std::max(worst, std::abs(v - 6.0));
  CHECK(worst < 0.18);
}

TEST_CASE("radial curvature oracle vanishes on Schwarzschild") {
  for (int n : {3, 4}) {
    ProfileSpec s;
    s.kind = "schwarzschild";
    s.params = {{"mass", 0.3}};
    auto p = Profile::make(n, s);
    for (double r : {1.5, 2.0, 4.0}) CHECK(std::abs(radial_scalar_curvature(*p->radial(), n, r)) < 1e-12);
  }
}

TEST_CASE("schwarzschild curvature converges") {
  double prev = 0.0;
  for (double h : {0.2, 0.1}) {
    auto g = make("schwarzschild", {{"mass", 1.0}}, h, 6.5, 2.0);
    auto f = scalar_curvature_field(g, DerivativeMode::FiniteDifference, 3.0, 6.0);
    double worst = 0.0;
    for (double v : f.values)
      if (!std::isnan(v)) worst = std::max(worst, std::abs(v));
    if (prev > 0.0) CHECK(prev / worst >= 1.8);
    prev = worst;
  }
}

TEST_CASE("level set areas") {
  auto cone = make("cone", {{"slope", 1.0}}, 0.1, 3.0);
  CHECK(level_set_area(cone, 2.0) == doctest::Approx(16.0 * kPi).epsilon(0.01));
  CHECK(level_set_area(cone, 6.0) == 0.0);
  const LevelSetProfile empty = extract_level_set(cone, 6.0);
  CHECK(empty.out_of_range);
  // clipping keeps the area bounded by the full area
  CHECK(level_set_area(cone, 2.0, 1.0) == 0.0);
  CHECK(level_set_area(cone, 2.0, 2.5) == doctest::Approx(level_set_area(cone, 2.0)));

  auto schw = make("schwarzschild", {{"mass", 1.0}}, 0.1, 6.0, 2.0);
  CHECK(level_set_area(schw, schwarzschild_profile(3, 1.0, 5.0)) == doctest::Approx(100.0 * kPi).epsilon(0.01));
  double prev = 0.0;
  for (double r = 2.5; r < 5.5; r += 0.25) {
    const double a = level_set_area(schw, schwarzschild_profile(3, 1.0, r));
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("level set mean curvature") {
  auto cone = make("cone", {{"slope", 1.0}}, 0.1, 3.0);
  for (auto mode : {DerivativeMode::Analytic, DerivativeMode::FiniteDifference}) {
    const LevelSetProfile p = level_set_mean_curvature(cone, 2.0, mode);
    CHECK(p.mean_curvature_integral / p.area == doctest::Approx(1.0).epsilon(0.01));
    CHECK(p.weighted_term / p.area == doctest::Approx(0.5).epsilon(0.01));
  }
  auto schw = make("schwarzschild", {{"mass", 1.0}}, 0.1, 6.0, 2.0);
  const LevelSetProfile s = level_set_mean_curvature(schw, schwarzschild_profile(3, 1.0, 4.0));
  CHECK(s.min_mean_curvature == doctest::Approx(0.5).epsilon(0.05));
  CHECK(s.max_mean_curvature == doctest::Approx(0.5).epsilon(0.05));
  auto plane = make("affine", {{"a0", 1.0}, {"a1", 0.5}}, 0.1, 1.0);
  const LevelSetProfile pl = level_set_mean_curvature(plane, 0.1, DerivativeMode::FiniteDifference);
  CHECK(std::abs(pl.max_mean_curvature) < 1e-9);
  CHECK(std::abs(pl.min_mean_curvature) < 1e-9);
}

TEST_CASE("induced volume") {
  auto flat = make("flat", {{"height", 0.5}}, 0.1, 1.2);
  CHECK(induced_volume(flat, 1.0) == doctest::Approx(4.0 / 3.0 * kPi).epsilon(0.01));
  auto cone = make("cone", {{"slope", 1.0}}, 0.05, 2.1, 1.0);
  CHECK(induced_volume(cone, 2.0) == doctest::Approx(std::sqrt(2.0) * 4.0 / 3.0 * kPi * 7.0).epsilon(0.01));
  const VolumeSplit fs = induced_volume_split(flat, 1.0, 0.0);
  CHECK(fs.below == 0.0);
  auto saddle = make("saddle", {{"scale", 1.0}}, 0.1, 1.2);
  const VolumeSplit ss = induced_volume_split(saddle, 1.0, 0.0);
  CHECK(ss.below == doctest::Approx(ss.above).epsilon(0.01));
}

TEST_CASE("outward area clamp") {
  auto cone = make("cone", {{"slope", 1.0}}, 0.1, 3.0);
  CHECK(outward_area_clamp_check(cone, 1.5, 2.0));
  auto wiggly = make("corrugated", {{"amplitude", 0.2}, {"frequency", 12.0}}, 0.04, 2.2);
  CHECK_FALSE(outward_area_clamp_check(wiggly, 1.75, 2.0));
}

TEST_CASE("level-set extraction is deterministic") {
  auto schw = make("schwarzschild", {{"mass", 0.5}}, 0.1, 3.0, 1.0);
  const LevelSetProfile a = level_set_mean_curvature(schw, 1.5);
  const LevelSetProfile b = level_set_mean_curvature(schw, 1.5);
  CHECK(a.area == b.area);
  CHECK(a.weighted_term == b.weighted_term);
}
