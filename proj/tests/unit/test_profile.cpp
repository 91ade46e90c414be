#include <cmath>
#include <random>

#include "afg/profile.hpp"
#include "doctest.h"

using namespace afg;

namespace {

// Central-difference check of gradient and Hessian against the analytic ones.
void check_derivatives(const Profile& p, const Vec& x, double tol) {
  const int n = p.dim();
  const double e = 1e-4;
  const Differentials d = p.differentials(x);
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += e;
    xm[i] -= e;
    CHECK(d.gradient[i] == doctest::Approx((p.value(xp) - p.value(xm)) / (2 * e)).epsilon(tol));
    const Differentials dp = p.differentials(xp), dm = p.differentials(xm);
    for (int j = 0; j < n; ++j)
      CHECK(d.h(i, j) == doctest::Approx((dp.gradient[j] - dm.gradient[j]) / (2 * e)).epsilon(tol).scale(1.0));
  }
}

}  // namespace

TEST_CASE("schwarzschild closed forms") {
  CHECK(schwarzschild_profile(3, 0.7, 1.4) == 0.0);
  CHECK(schwarzschild_profile(3, 0.5, 2.5) == doctest::Approx(std::sqrt(6.0)));
  CHECK(schwarzschild_profile(4, 0.5, 1.0) == doctest::Approx(0.0));
  CHECK(horizon_radius(3, 1.0) == doctest::Approx(2.0));
  CHECK(horizon_radius(4, 2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(schwarzschild_profile(5, 1.0, 3.0), ValidationError);
  CHECK_THROWS_AS(schwarzschild_profile(3, 1.0, 1.9), ValidationError);
  CHECK_THROWS_AS(schwarzschild_profile(3, -1.0, 3.0), ValidationError);
  // the slope oracle S_1'(5) = 4 / sqrt(8 * 3)
  CHECK(schwarzschild_slope(3, 1.0, 5.0) == doctest::Approx(4.0 / std::sqrt(24.0)));
}

TEST_CASE("schwarzschild is nondecreasing and its derivatives match differences") {
  for (int n : {3, 4}) {
    for (double m : {0.05, 0.5, 2.0}) {
      const double rh = horizon_radius(n, m);
      double prev = 0.0;
      for (int k = 1; k < 200; ++k) {
        const double r = rh * (1.0 + 0.05 * k);
        const double v = schwarzschild_profile(n, m, r);
        CHECK(v >= prev);
        prev = v;
        const double e = 1e-6 * r;
        const double fd = (schwarzschild_profile(n, m, r + e) - schwarzschild_profile(n, m, r - e)) / (2 * e);
        CHECK(schwarzschild_slope(n, m, r) == doctest::Approx(fd).epsilon(1e-5));
        const double fd2 = (schwarzschild_slope(n, m, r + e) - schwarzschild_slope(n, m, r - e)) / (2 * e);
        CHECK(schwarzschild_second(n, m, r) == doctest::Approx(fd2).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("profile derivatives agree with numerical differentiation") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto spec = [](std::string kind, std::map<std::string, double> params) {
    ProfileSpec s;
    s.kind = std::move(kind);
    s.params = std::move(params);
    return s;
  };
  const std::vector<ProfileSpec> specs = {
      spec("affine", {{"c", 1.0}, {"a0", 0.3}, {"a1", -0.2}, {"a2", 0.5}}),
      spec("saddle", {{"scale", 0.7}}),
      spec("paraboloid", {{"curvature", 1.3}}),
      spec("corrugated", {{"amplitude", 0.2}, {"frequency", 3.0}}),
      spec("schwarzschild", {{"mass", 0.2}}),
      spec("shell", {{"mass", 1.0}, {"inner_mass", 0.5}, {"shell_inner", 3.0}, {"shell_outer", 5.0}}),
  };
  for (const auto& s : specs) {
    CAPTURE(s.kind);
    auto p = Profile::make(3, s);
    for (int trial = 0; trial < 20; ++trial) {
      Vec x{u(rng), u(rng), u(rng), 0.0};
      if (s.kind == "shell") {
        for (double& c : x) c *= 2.5;
      }
      if (norm(x, 3) < 1.0) continue;
      check_derivatives(*p, x, 1e-4);
    }
  }
}

TEST_CASE("bump derivatives") {
  ProfileSpec s;
  s.kind = "flat";
  s.bumps.push_back(Bump{{0.3, -0.2, 0.1, 0.0}, 0.8, 0.4});
  auto p = Profile::make(3, s);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.7);
  for (int trial = 0; trial < 30; ++trial) check_derivatives(*p, Vec{u(rng), u(rng), u(rng), 0.0}, 1e-4);
  CHECK(p->value(Vec{0.3, -0.2, 0.1, 0.0}) == doctest::Approx(0.4));
  CHECK(p->value(Vec{2.0, 0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("shell profile is continuous and matches Schwarzschild outside") {
  ProfileSpec s;
  s.kind = "shell";
  s.params = {{"mass", 1.0}, {"inner_mass", 0.5}, {"shell_inner", 3.0}, {"shell_outer", 5.0}};
  auto p = Profile::make(3, s);
  const RadialFunction& phi = *p->radial();
  for (double r : {3.0, 5.0}) {
    CHECK(phi.value(r - 1e-9) == doctest::Approx(phi.value(r + 1e-9)).epsilon(1e-7));
    CHECK(phi.d1(r - 1e-9) == doctest::Approx(phi.d1(r + 1e-9)).epsilon(1e-6));
  }
  CHECK(phi.value(2.0) == doctest::Approx(schwarzschild_profile(3, 0.5, 2.0)));
  const double lambda = *p->asymptotic_constant();
  CHECK(phi.value(9.0) == doctest::Approx(lambda + schwarzschild_profile(3, 1.0, 9.0)));
  CHECK(*p->hole_radius() == doctest::Approx(1.0));
  // arclength table agrees with direct quadrature of the slope
  const double direct = phi.value(3.0) + 0.0;
  double integral = 0.0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) integral += phi.d1(3.0 + (i + 0.5) * 2.0 / steps) * 2.0 / steps;
  CHECK(phi.value(5.0) == doctest::Approx(direct + integral).epsilon(1e-7));
  s.params["inner_mass"] = 1.5;
  CHECK_THROWS_AS(Profile::make(3, s), ValidationError);
}

TEST_CASE("thin well is calibrated to its depth") {
  ProfileSpec s;
  s.kind = "thin_well";
  s.params = {{"depth", 4.0}, {"width", 0.8}, {"r0", 3.0}};
  auto p = Profile::make(3, s);
  const double depth = (3.0 - 0.8) + radial_arclength(*p->radial(), 0.0, 0.8);
  CHECK(depth == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(p->value(Vec{1.0, 0.0, 0.0, 0.0}) == 0.0);
  CHECK(p->value(Vec{0.0, 0.0, 0.0, 0.0}) < 0.0);

  s.params["depth"] = 0.0;
  auto flat = Profile::make(3, s);
  CHECK(flat->value(Vec{0.1, 0.0, 0.0, 0.0}) == 0.0);
  s.params["depth"] = 2.0;
  CHECK_THROWS_AS(Profile::make(3, s), ValidationError);
}

TEST_CASE("unknown kinds and missing parameters are rejected") {
  ProfileSpec s;
  s.kind = "torus";
  CHECK_THROWS_AS(Profile::make(3, s), ValidationError);
  s.kind = "schwarzschild";
  CHECK_THROWS_AS(Profile::make(3, s), ValidationError);
}
