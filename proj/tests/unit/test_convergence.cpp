#include <cmath>

#include "afg/convergence.hpp"
#include "doctest.h"

using namespace afg;

namespace {

FamilySpec small_schwarzschild() {
  FamilySpec s;
  s.schedule = {0.5, 0.25};
  s.grid.spacing = 0.25;
  s.grid.outer_radius = 4.5;
  s.radius = 3.5;
  s.pullback_samples = 16;
  return s;
}

}  // namespace

TEST_CASE("family kinds round trip") {
  for (FamilyKind k : {FamilyKind::Schwarzschild, FamilyKind::Perturbed, FamilyKind::ThinWell, FamilyKind::Flat})
    CHECK(parse_family_kind(family_kind_name(k)) == k);
  CHECK(parse_family_kind("thin-well") == FamilyKind::ThinWell);
  CHECK(parse_family_kind("perturbed-schwarzschild") == FamilyKind::Perturbed);
  CHECK_THROWS_AS(parse_family_kind("kerr"), ValidationError);
}

TEST_CASE("family spec validation") {
  FamilySpec s = small_schwarzschild();
  CHECK_NOTHROW(validate_family_spec(s));
  s.schedule = {};
  CHECK_THROWS_AS(validate_family_spec(s), ValidationError);
  s.schedule = {0.5, 0.25, 0.5};
  CHECK_THROWS_AS(validate_family_spec(s), ValidationError);
  s.schedule = {0.5, 0.0};
  CHECK_THROWS_AS(validate_family_spec(s), ValidationError);
  s = small_schwarzschild();
  s.radius = 10.0;
  CHECK_THROWS_AS(validate_family_spec(s), ValidationError);
}

TEST_CASE("generators reject members outside the class") {
  ClassParameters p{2.5, 2.5, 5.0, -0.5, 0.0};
  GridSpec grid{0.25, 4.0};
  // horizon 2m must stay inside r0 / 2
  CHECK_THROWS_AS(make_schwarzschild(3, 0.7, p, grid), ValidationError);
  CHECK_NOTHROW(make_schwarzschild(3, 0.5, p, grid));
  CHECK_THROWS_AS(make_thin_well(3, 6.0, 0.8, p, grid), ValidationError);
  CHECK_THROWS_AS(make_thin_well(3, 2.0, 0.3, p, grid), ValidationError);
  const GraphManifold flat_well = make_thin_well(3, 0.0, 0.8, p, grid);
  const GraphManifold flat = make_flat(3, p, grid);
  CHECK(flat_well.heights() == flat.heights());
}

TEST_CASE("zero-amplitude bump leaves the base unchanged") {
  ClassParameters p{3.0, 2.5, 5.0, -0.5, 0.0};
  const GraphManifold base = make_schwarzschild(3, 0.5, p, GridSpec{0.25, 5.0});
  const GraphManifold same = make_perturbed(base, Bump{{4, 0, 0, 0}, 0.6, 0.0});
  CHECK(same.heights() == base.heights());
  // a bump touching the hole is rejected
  CHECK_THROWS_AS(make_perturbed(base, Bump{{1.2, 0, 0, 0}, 0.6, 1e-3}), ValidationError);
}

TEST_CASE("Schwarzschild members pass validation") {
  const FamilySpec s = small_schwarzschild();
  const GraphManifold g = build_member(s, 0);
  const MemberValidation v = validate_member(g, member_mass(s, 0), s.member);
  CHECK_MESSAGE(v.ok, (v.failures.empty() ? "" : v.failures.front()));
  CHECK(v.max_gradient <= s.params.gamma);
  CHECK(v.depth <= s.params.depth);
  CHECK(v.penrose_margin >= -1e-9);
  CHECK(v.min_mean_curvature >= -s.member.mean_curvature);
}

TEST_CASE("zoomed h0 matches the closed form and vanishes without mass") {
  const FamilySpec s = small_schwarzschild();
  const GraphManifold g = build_member(s, 0);
  const H0Result r = zoom_h0(g, 0.5);
  CHECK(r.height == doctest::Approx(2.0 * std::sqrt(std::sqrt(2.0) - 1)).epsilon(0.01));
  FamilySpec f;
  f.kind = FamilyKind::Flat;
  f.schedule = {0.0};
  CHECK(zoom_h0(build_member(f, 0), 0.0).height == 0.0);
}

TEST_CASE("small Schwarzschild experiment: rows, bounds and trend rules") {
  const ConvergenceReport r = stability_experiment(small_schwarzschild());
  REQUIRE(r.rows.size() == 2);
  for (const MemberRecord& row : r.rows) {
    CHECK(row.gh_bound == doctest::Approx(2 * row.epsilon));
    CHECK(row.ratios_within);
    CHECK(row.diameter <= row.diameter_bound);
    CHECK(row.volume_deviation == doctest::Approx(std::abs(row.volume - row.euclidean_volume)));
    CHECK(row.boundary_points == 16);
  }
  // smaller mass, smaller discrepancy
  CHECK(r.rows[1].epsilon < r.rows[0].epsilon);
  CHECK(r.rows[1].volume_deviation < r.rows[0].volume_deviation);
  REQUIRE(r.trend("epsilon"));
  CHECK(r.trend("epsilon")->rule == "monotone");
  CHECK(r.trend("pointed_deficit")->rule == "final_below");
  CHECK(r.trend("no_such_column") == nullptr);
}

TEST_CASE("flat family has vanishing discrepancies") {
  FamilySpec f;
  f.kind = FamilyKind::Flat;
  f.schedule = {0.0};
  f.grid.spacing = 0.25;
  f.grid.outer_radius = 4.5;
  f.radius = 3.5;
  f.pullback_samples = 16;
  const ConvergenceReport r = stability_experiment(f);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].epsilon <= 1e-9);
  CHECK(r.rows[0].slab_height <= 1e-9);
  CHECK(r.all_passed());
}

TEST_CASE("pointed experiment rejects bad radii and point choices") {
  FamilySpec s = small_schwarzschild();
  CHECK_THROWS_AS(pointed_ball_experiment(s, 3.0), ValidationError);
  CHECK_THROWS_AS(pointed_ball_experiment(s, 1.0, PointChoice::WellBottom), ValidationError);
}
