#include <cmath>
#include <numbers>

#include "afg/mass.hpp"
#include "doctest.h"

using namespace afg;

namespace {

constexpr double kPi = std::numbers::pi;

GraphManifold make(const std::string& kind, std::map<std::string, double> params, double spacing, double r_max,
                   double hole = 0.0, int n = 3) {
  ProfileSpec s;
  s.kind = kind;
  s.params = std::move(params);
  return GraphManifold::from_profile(GraphDomain::make(n, spacing, r_max, hole), Profile::make(n, s),
                                     ClassParameters{});
}

}  // namespace

TEST_CASE("flat graph has zero mass") {
  auto g = make("flat", {{"height", 2.0}}, 0.5, 12.0);
  MassOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  CHECK(mass_integral(g, 5.0, fd) == 0.0);
  const MassEstimate e = adm_mass(g, {4.0, 6.0, 8.0}, fd);
  CHECK(e.mass == 0.0);
  CHECK_FALSE(e.diverging);
}

TEST_CASE("schwarzschild mass from finite differences") {
  for (double m : {0.25, 1.0}) {
    auto g = make("schwarzschild", {{"mass", m}}, 1.0, 44.0, 2.0 * m);
    MassOptions fd;
    fd.mode = DerivativeMode::FiniteDifference;
    const MassEstimate e = adm_mass(g, {10.0, 20.0, 40.0}, fd);
    CHECK(e.mass == doctest::Approx(m).epsilon(0.05));
    const MassEstimate a = adm_mass(g, {10.0, 20.0, 40.0});
    CHECK(a.mass == doctest::Approx(m).epsilon(1e-3));
  }
}

TEST_CASE("mass integral rejects radii next to the box edge") {
  auto g = make("schwarzschild", {{"mass", 1.0}}, 1.0, 20.0, 2.0);
  MassOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  CHECK_THROWS_AS(mass_integral(g, 19.0, fd), ValidationError);
  CHECK_THROWS_AS(mass_integral(g, 1.5, fd), ValidationError);
  CHECK_THROWS_AS(adm_mass(g, {5.0}, fd), ValidationError);
}

TEST_CASE("lam identity closes on schwarzschild") {
  auto g = make("schwarzschild", {{"mass", 1.0}}, 0.2, 6.0, 2.0);
  const LamIdentityReport r = lam_identity(g, schwarzschild_profile(3, 1.0, 4.0), 1.0, DerivativeMode::FiniteDifference);
  CHECK(r.lhs == doctest::Approx(16.0 * kPi));
  CHECK(std::abs(r.relative_residual()) < 0.03);
  CHECK_FALSE(r.empty_level);
  CHECK_FALSE(r.near_critical);
}

TEST_CASE("threshold and h0 height") {
  CHECK(h0_threshold(3, 1.0) == doctest::Approx(2.0 * 4.0 * kPi * 4.0));
  CHECK(h0_threshold(4, 1.0) == doctest::Approx(2.0 * 2.0 * kPi * kPi * std::pow(2.0, 1.5)));
  CHECK_THROWS_AS(h0_threshold(2, 1.0), ValidationError);
  const double m = 0.5;
  const double rho = 2.0 * std::sqrt(2.0) * m;
  auto g = make("schwarzschild", {{"mass", m}}, rho / 12.0, 2.5 * rho, 2.0 * m);
  const H0Result r = h0_height(g, m);
  CHECK_FALSE(r.flagged);
  CHECK(r.height == doctest::Approx(4.0 * m * std::sqrt(std::sqrt(2.0) - 1.0)).epsilon(0.02));
  CHECK(r.area <= r.threshold);
}

TEST_CASE("h0 is flagged when no level passes") {
  auto g = make("flat", {{"height", 0.0}}, 0.5, 4.0);
  const H0Result r = h0_height(g, 0.01);
  CHECK(r.flagged);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("vertical normalization, slab and penrose margin") {
  const double m = 0.5;
  const double rho = 2.0 * std::sqrt(2.0) * m;
  auto g = make("schwarzschild", {{"mass", m}}, rho / 12.0, 2.5 * rho, 2.0 * m);
  const Normalized n = vertical_normalize(g, m);
  CHECK(slab_height(n.manifold, 2.0) == doctest::Approx(slab_height(g, 2.0) - n.h0.height));
  CHECK(slab_check(n.manifold, slab_height(n.manifold, 2.0) + 1e-9, 2.0));
  CHECK_FALSE(slab_check(n.manifold, 0.5 * slab_height(n.manifold, 2.0), 2.0));
  const PenroseMargin p = penrose_check(g, m);
  CHECK(std::abs(p.margin) <= 1e-9 * p.threshold);
  const PenroseMargin small = penrose_check(make("schwarzschild", {{"mass", m}}, 0.2, 3.0, 0.5), m);
  CHECK(small.margin > 0.0);
}

TEST_CASE("volume split of a tilted plane") {
  auto g = make("affine", {{"a0", 1.0}}, 0.1, 1.5);
  const VolumeSplit v = volume_split(g, 1.0);
  const double full = std::sqrt(2.0) * 4.0 / 3.0 * kPi;
  CHECK(v.below == doctest::Approx(0.5 * full).epsilon(1e-3));
  CHECK(v.above == doctest::Approx(0.5 * full).epsilon(1e-3));
}
