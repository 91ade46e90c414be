#include "afg/mass.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "afg/parallel.hpp"

namespace afg {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule {
  std::vector<double> x, w;  // on [-1, 1]
};

template <int N>
Rule gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  Rule r;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wt[i]);
      continue;
    }
    r.x.push_back(-a[i]);
    r.w.push_back(wt[i]);
    r.x.push_back(a[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}

Rule legendre(int nodes) {
  switch (nodes) {
    case 8: return gauss_rule<8>();
    case 16: return gauss_rule<16>();
    case 32: return gauss_rule<32>();
    case 64: return gauss_rule<64>();
    default: throw ValidationError("polar_nodes must be one of 8, 16, 32, 64");
  }
}

struct SpherePoint {
  Vec u;
  double w;
};

// Product rule on the unit sphere S^(n-1); weights sum to its area.
std::vector<SpherePoint> sphere_rule(int n, int polar) {
  std::vector<SpherePoint> pts;
  const Rule gl = legendre(polar);
  const int az = 2 * polar;
  if (n == 2) {
    for (int k = 0; k < az; ++k) {
      const double phi = 2.0 * kPi * k / az;
      pts.push_back({Vec{std::cos(phi), std::sin(phi), 0, 0}, 2.0 * kPi / az});
    }
  } else if (n == 3) {
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double ct = gl.x[i], st = std::sqrt(1.0 - ct * ct);
      for (int k = 0; k < az; ++k) {
        const double phi = 2.0 * kPi * (k + 0.5) / az;
        pts.push_back({Vec{st * std::cos(phi), st * std::sin(phi), ct, 0}, gl.w[i] * 2.0 * kPi / az});
      }
    }
  } else if (n == 4) {
    for (std::size_t c = 0; c < gl.x.size(); ++c) {
      const double chi = 0.5 * kPi * (gl.x[c] + 1.0);
      const double wc = 0.5 * kPi * gl.w[c] * std::sin(chi) * std::sin(chi);
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double ct = gl.x[i], st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < az; ++k) {
          const double phi = 2.0 * kPi * (k + 0.5) / az;
          const double s = std::sin(chi);
          pts.push_back({Vec{std::cos(chi), s * ct, s * st * std::cos(phi), s * st * std::sin(phi)},
                         wc * gl.w[i] * 2.0 * kPi / az});
        }
      }
    }
  } else {
    throw ValidationError("sphere quadrature supports n = 2, 3, 4");
  }
  return pts;
}

// Differentials at an arbitrary point from node finite differences, multilinearly blended.
bool interpolated_differentials(const GraphManifold& g, const Vec& x, Differentials* out) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const int K = d.half();
  Index base{};
  Vec frac{};
  for (int a = 0; a < n; ++a) {
    const double u = x[a] / d.spacing;
    int k = static_cast<int>(std::floor(u));
    if (k < -K || k >= K) return false;
    base[a] = k;
    frac[a] = u - k;
  }
  Differentials acc;
  for (int corner = 0; corner < (1 << n); ++corner) {
    Index k = base;
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      if (corner & (1 << a)) {
        ++k[a];
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    Differentials dd;
    if (!try_differentials(g, d.linear(k), DerivativeMode::FiniteDifference, &dd)) return false;
    for (int i = 0; i < n; ++i) {
      acc.gradient[i] += w * dd.gradient[i];
      for (int j = 0; j < n; ++j) acc.h(i, j) += w * dd.h(i, j);
    }
  }
  *out = acc;
  return true;
}

struct Fit {
  double mass = 0.0, slope = 0.0, residual = 0.0;
};

Fit least_squares(const std::vector<double>& radii, const std::vector<double>& values, double p) {
  const std::size_t k = radii.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::pow(radii[i], -p);
    sx += x;
    sy += values[i];
    sxx += x * x;
    sxy += x * values[i];
  }
  Fit f;
  const double det = k * sxx - sx * sx;
  f.slope = det != 0.0 ? (k * sxy - sx * sy) / det : 0.0;
  f.mass = (sy - f.slope * sx) / k;
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = values[i] - (f.mass + f.slope * std::pow(radii[i], -p));
    ss += e * e;
  }
  f.residual = std::sqrt(ss / k);
  return f;
}

}  // namespace

double mass_integral(const GraphManifold& g, double r, const MassOptions& opts) {
  const int n = g.dim();
  const GraphDomain& d = g.domain();
  const bool analytic = opts.mode == DerivativeMode::Analytic || (opts.mode == DerivativeMode::Auto && g.profile());
  if (opts.mode == DerivativeMode::Analytic && !g.profile())
    throw ValidationError("analytic derivatives requested but the manifold has no profile");
  if (!(r > 0.0)) throw ValidationError("mass radius must be positive");
  if (d.has_hole() && r <= d.hole_radius + 2.0 * d.spacing) throw ValidationError("mass radius too close to the hole");
  if (!analytic && r > d.outer_radius - 3.0 * d.spacing)
    throw ValidationError("mass radius too close to the grid boundary for finite differences");
  if (analytic && r > d.outer_radius) throw ValidationError("mass radius exceeds the grid");
  const auto rule = sphere_rule(n, opts.polar_nodes);
  const double total = chunked_sum<double>(rule.size(), [&](std::size_t i) {
    Vec x{};
    for (int a = 0; a < n; ++a) x[a] = r * rule[i].u[a];
    Differentials dd;
    if (analytic) {
      dd = g.profile()->differentials(x);
    } else if (!interpolated_differentials(g, x, &dd)) {
      throw NumericalError("mass quadrature point lacks a finite-difference stencil");
    }
    const Vec v = reilly_vector(dd, n);
    return dot(v, rule[i].u, n) * rule[i].w * std::pow(r, n - 1);
  });
  return total / (2.0 * (n - 1) * unit_sphere_area(n));
}

MassEstimate adm_mass(const GraphManifold& g, const std::vector<double>& radii, const MassOptions& opts) {
  if (radii.size() < 2) throw ValidationError("mass extrapolation needs at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ValidationError("mass radii must be strictly increasing");
  MassEstimate est;
  est.radii = radii;
  for (double r : radii) est.values.push_back(mass_integral(g, r, opts));

  const std::size_t k = radii.size();
  double p = 1.0;
  if (k >= 3) {
    const double r1 = radii[k - 3], r2 = radii[k - 2], r3 = radii[k - 1];
    const double d1 = est.values[k - 3] - est.values[k - 2];
    const double d2 = est.values[k - 2] - est.values[k - 1];
    const double scale = std::max(1.0, std::abs(est.values[k - 1]));
    if (std::abs(d1) < 1e-10 * scale || std::abs(d2) < 1e-10 * scale) {
      est.note = "increments at rounding level; exponent fixed at 1";
    } else if (d1 * d2 < 0.0) {
      est.note = "oscillating increments; exponent fixed at 1";
    } else if (std::abs(d2) >= std::abs(d1)) {
      est.diverging = true;
      est.note = "increments do not shrink with radius";
    } else {
      const double target = d1 / d2;
      auto F = [&](double q) {
        return (std::pow(r1, -q) - std::pow(r2, -q)) / (std::pow(r2, -q) - std::pow(r3, -q)) - target;
      };
      double lo = 1e-3, hi = 12.0;
      if (F(lo) * F(hi) < 0.0) {
        std::uintmax_t iters = 100;
        auto tol = boost::math::tools::eps_tolerance<double>(40);
        const auto root = boost::math::tools::toms748_solve(F, lo, hi, tol, iters);
        p = 0.5 * (root.first + root.second);
        est.note = "exponent fitted from the last three radii";
      } else {
        est.note = "exponent out of range; fixed at 1";
      }
    }
  } else {
    est.note = "two radii; exponent fixed at 1";
  }
  const Fit fit = least_squares(radii, est.values, p);
  est.exponent = p;
  est.mass = fit.mass;
  est.residual = fit.residual;
  est.correction = fit.mass - est.values.back();
  if (!std::isfinite(est.mass)) {
    est.diverging = true;
    est.note = "extrapolation produced a non-finite value";
  }
  return est;
}

LamIdentityReport lam_identity(const GraphManifold& g, double h, double mass, DerivativeMode mode) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  LamIdentityReport rep;
  rep.height = h;
  rep.mass = mass;
  rep.lhs = 2.0 * (n - 1) * unit_sphere_area(n) * mass;
  const double r_trunc = d.outer_radius - 3.0 * d.spacing;
  const double shell = 2.0 * d.spacing;
  rep.truncation_radius = r_trunc;
  const CurvatureField field = scalar_curvature_field(g, mode, 0.0, r_trunc);
  const double cell = d.cell_volume();

  struct Acc {
    double bulk = 0.0, shell = 0.0;
    std::size_t skipped = 0;
    Acc& operator+=(const Acc& o) {
      bulk += o.bulk;
      shell += o.shell;
      skipped += o.skipped;
      return *this;
    }
  };
  const Acc acc = chunked_sum<Acc>(d.node_count(), [&](std::size_t i) {
    Acc a;
    if (!g.active(i) || g.height(i) < h) return a;
    const double rad = norm(d.position(i), n);
    if (rad > r_trunc) return a;
    const double R = field.values[i];
    if (std::isnan(R)) {
      ++a.skipped;
      return a;
    }
    a.bulk = R * cell;
    if (rad > r_trunc - shell) a.shell = std::abs(R) * cell;
    return a;
  });
  rep.bulk = acc.bulk;
  rep.skipped_nodes = acc.skipped;
  rep.tail = acc.shell * r_trunc / shell;

  LevelSetOptions lo;
  lo.curvature = true;
  lo.mode = mode;
  const LevelSetProfile level = extract_level_set(g, h, lo);
  rep.boundary = level.weighted_term;
  rep.near_critical = level.near_critical;
  rep.empty_level = level.out_of_range;
  rep.residual = rep.lhs - rep.bulk - rep.boundary;
  return rep;
}

double h0_threshold(int n, double m) {
  if (n < 3) throw ValidationError("h0 needs n >= 3");
  if (!(m > 0.0)) throw ValidationError("h0 needs a positive mass");
  return 2.0 * unit_sphere_area(n) * std::pow(2.0 * m, (n - 1.0) / (n - 2.0));
}

H0Result h0_height(const GraphManifold& g, double m, const H0Options& opts) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  if (opts.samples < 2) throw ValidationError("h0 needs at least two height samples");
  H0Result res;
  res.threshold = h0_threshold(n, m);
  double lo = std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    if (!g.active(i)) continue;
    const double f = g.height(i);
    lo = std::min(lo, f);
    const Index k = d.index(i);
    for (int a = 0; a < n; ++a)
      if (std::abs(k[a]) == d.half()) hi = std::min(hi, f);
  }
  if (!(hi - lo > 1e-12 * std::max(1.0, std::abs(lo)))) {
    res.height = lo;
    res.flagged = true;
    res.note = "degenerate height range; every nonempty level exceeds the threshold";
    return res;
  }
  auto passes = [&](double h, double* area) {
    const LevelSetProfile p = extract_level_set(g, h);
    *area = p.area;
    return !p.near_critical && p.area <= res.threshold;
  };
  const int S = opts.samples;
  int best = -1;
  double best_area = 0.0;
  std::vector<double> heights;
  for (int k = 1; k < S; ++k) heights.push_back(lo + (hi - lo) * k / S);
  std::vector<char> ok(heights.size());
  std::vector<double> areas(heights.size());
  for (std::size_t k = 0; k < heights.size(); ++k) {
    ok[k] = passes(heights[k], &areas[k]);
    if (ok[k]) {
      best = static_cast<int>(k);
      best_area = areas[k];
    }
  }
  if (best < 0) {
    res.height = lo;
    res.area = areas.front();
    res.flagged = true;
    res.note = "no sampled level passes the area threshold";
    return res;
  }
  if (best == static_cast<int>(heights.size()) - 1) {
    res.height = heights.back();
    res.area = best_area;
    res.flagged = true;
    res.note = "every sampled level passes; threshold not reached inside the grid";
    return res;
  }
  double a = heights[best], b = heights[best + 1];
  double area_a = best_area;
  for (int s = 0; s < opts.bisection_steps; ++s) {
    const double mid = 0.5 * (a + b);
    double area = 0.0;
    if (passes(mid, &area)) {
      a = mid;
      area_a = area;
    } else {
      b = mid;
    }
  }
  res.height = a;
  res.area = area_a;
  return res;
}

Normalized vertical_normalize(const GraphManifold& g, double m, const H0Options& opts) {
  H0Result h0 = h0_height(g, m, opts);
  if (h0.flagged) return Normalized{g, h0};
  return Normalized{g.shifted(-h0.height), h0};
}

PenroseMargin penrose_check(const GraphManifold& g, double m) {
  const int n = g.dim();
  if (n < 3) throw ValidationError("Penrose bound needs n >= 3");
  if (m < 0.0) throw ValidationError("Penrose bound needs m >= 0");
  PenroseMargin p;
  p.threshold = unit_sphere_area(n) * std::pow(2.0 * m, (n - 1.0) / (n - 2.0));
  p.boundary_volume = g.domain().has_hole() ? sphere_area(n, g.domain().hole_radius) : 0.0;
  p.margin = p.threshold - p.boundary_volume;
  return p;
}

double slab_height(const GraphManifold& g, double r) {
  const GraphDomain& d = g.domain();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    if (!g.active(i)) continue;
    if (norm(d.position(i), d.dim) < r) best = std::max(best, g.height(i));
  }
  return best;
}

bool slab_check(const GraphManifold& g, double eps, double r) { return slab_height(g, r) < eps; }

VolumeSplit volume_split(const GraphManifold& g, double r) { return induced_volume_split(g, r, 0.0); }

}  // namespace afg
