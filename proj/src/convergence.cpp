#include "afg/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "afg/metricspace.hpp"

namespace afg {

namespace {

std::string point_text(const Vec& x, int n) {
  std::ostringstream s;
  s << '(';
  for (int a = 0; a < n; ++a) s << (a ? ", " : "") << x[a];
  s << ')';
  return s.str();
}

std::size_t nearest_grid_node(const GraphDomain& d, const Vec& x) {
  Index k{};
  for (int a = 0; a < d.dim; ++a) {
    k[a] = static_cast<int>(std::lround(x[a] / d.spacing));
    k[a] = std::clamp(k[a], -d.half(), d.half());
  }
  return d.linear(k);
}

double schwarzschild_or_zero(int n, double m, double r) {
  if (m <= 0.0) return 0.0;
  return schwarzschild_profile(n, m, r);
}

}  // namespace

FamilyKind parse_family_kind(const std::string& name) {
  if (name == "schwarzschild") return FamilyKind::Schwarzschild;
  if (name == "perturbed" || name == "perturbed-schwarzschild") return FamilyKind::Perturbed;
  if (name == "thin_well" || name == "thin-well") return FamilyKind::ThinWell;
  if (name == "flat") return FamilyKind::Flat;
  throw ValidationError("unknown family kind '" + name + "'");
}

std::string family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Schwarzschild: return "schwarzschild";
    case FamilyKind::Perturbed: return "perturbed";
    case FamilyKind::ThinWell: return "thin_well";
    case FamilyKind::Flat: return "flat";
  }
  return "unknown";
}

void validate_family_spec(const FamilySpec& spec) {
  if (spec.n != 3 && spec.n != 4) throw ValidationError("family dimension must be 3 or 4");
  if (spec.schedule.empty()) throw ValidationError("family schedule is empty");
  for (std::size_t j = 1; j < spec.schedule.size(); ++j) {
    const double a = spec.schedule[j - 1], b = spec.schedule[j];
    const bool up = spec.schedule[1] > spec.schedule[0];
    if (a == b || (b > a) != up) throw ValidationError("family schedule must be strictly monotone");
  }
  for (double v : spec.schedule)
    if (!std::isfinite(v) || v < 0.0 || (spec.kind != FamilyKind::Flat && v == 0.0))
      throw ValidationError("schedule entries must be positive");
  const ClassParameters& p = spec.params;
  if (!(p.r0 > 0.0) || !(p.gamma > 0.0) || !(p.depth > 0.0)) throw ValidationError("r0, gamma and D must be positive");
  if (!(p.alpha < 0.0)) throw ValidationError("alpha must be negative");
  if (!(spec.grid.spacing > 0.0)) throw ValidationError("grid spacing must be positive");
  if (!(spec.radius > 0.0) || spec.radius >= spec.grid.outer_radius)
    throw ValidationError("experiment radius must lie inside the grid");
  if (spec.radius < p.r0) throw ValidationError("experiment radius must be at least r0");
  if (spec.stencil < 1 || spec.stencil > 4 || spec.ball_stencil < 1 || spec.ball_stencil > 4)
    throw ValidationError("stencil radius must be in 1..4");
  if (spec.pullback_samples < 3) throw ValidationError("pullback needs at least three samples");
  if (!(spec.ball_radius > 0.0)) throw ValidationError("ball radius must be positive");
  if (spec.zoom_resolution < 4) throw ValidationError("zoom resolution must be at least 4");
  if (spec.kind == FamilyKind::ThinWell && spec.well_depth > p.depth)
    throw ValidationError("well depth exceeds the class depth bound D");
  if (spec.kind == FamilyKind::Perturbed &&
      !(spec.shell_inner > 0.0 && spec.shell_outer > spec.shell_inner && spec.inner_fraction > 0.0 &&
        spec.inner_fraction < 1.0))
    throw ValidationError("perturbed family needs 0 < shell_inner < shell_outer and 0 < inner_fraction < 1");
}

ClassParameters class_parameters(const FamilySpec& spec) { return spec.params; }

GraphManifold make_schwarzschild(int n, double m, const ClassParameters& params, const GridSpec& grid) {
  if (!(m > 0.0)) throw ValidationError("Schwarzschild member needs m > 0");
  const double rh = horizon_radius(n, m);
  if (rh >= params.r0 / 2.0) throw ValidationError("horizon radius is not below r0/2");
  ProfileSpec s;
  s.kind = "schwarzschild";
  s.params = {{"mass", m}};
  return GraphManifold::from_profile(GraphDomain::make(n, grid.spacing, grid.outer_radius, rh), Profile::make(n, s),
                                     params);
}

GraphManifold make_perturbed(const GraphManifold& base, const Bump& bump, double curvature_tol) {
  if (base.profile() == nullptr) throw ValidationError("perturbation needs an analytic base profile");
  if (bump.amplitude == 0.0) return base;
  if (!(bump.radius > 0.0)) throw ValidationError("bump radius must be positive");
  const GraphDomain& d = base.domain();
  const int n = d.dim;
  if (d.has_hole() && norm(bump.center, n) - bump.radius <= d.hole_radius)
    throw ValidationError("bump support meets the hole");
  GraphManifold out = GraphManifold::from_profile(d, base.profile()->with_bumps({bump}), base.params());
  double base_min = std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_node = 0;
  std::size_t window = 0;
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    if (!base.active(i)) continue;
    Vec x = d.position(i);
    Vec dx{};
    for (int a = 0; a < n; ++a) dx[a] = x[a] - bump.center[a];
    if (norm(dx, n) >= bump.radius) continue;
    Differentials dd;
    if (!try_differentials(base, i, DerivativeMode::Analytic, &dd)) continue;
    ++window;
    base_min = std::min(base_min, scalar_curvature(base, i, DerivativeMode::Analytic));
    const double r = scalar_curvature(out, i, DerivativeMode::Analytic);
    if (r < worst) {
      worst = r;
      worst_node = i;
    }
  }
  if (window == 0) throw ValidationError("bump support contains no grid node");
  if (!(base_min > 0.0)) throw ValidationError("bump is not supported where the base scalar curvature is positive");
  if (worst < -curvature_tol) {
    std::ostringstream msg;
    msg << "perturbed scalar curvature " << worst << " below -" << curvature_tol << " at "
        << point_text(d.position(worst_node), n);
    throw ValidationError(msg.str());
  }
  return out;
}

GraphManifold make_thin_well(int n, double depth, double width, const ClassParameters& params, const GridSpec& grid) {
  if (depth > params.depth) throw ValidationError("well depth exceeds the class depth bound D");
  if (depth == 0.0) return make_flat(n, params, grid);
  if (!(width > 2.0 * grid.spacing)) throw ValidationError("well width is not resolved: need width > 2 h");
  ProfileSpec s;
  s.kind = "thin_well";
  s.params = {{"depth", depth}, {"width", width}, {"r0", params.r0}};
  return GraphManifold::from_profile(GraphDomain::make(n, grid.spacing, grid.outer_radius), Profile::make(n, s),
                                     params);
}

GraphManifold make_flat(int n, const ClassParameters& params, const GridSpec& grid) {
  ProfileSpec s;
  s.kind = "flat";
  s.params = {{"height", 0.0}};
  return GraphManifold::from_profile(GraphDomain::make(n, grid.spacing, grid.outer_radius), Profile::make(n, s),
                                     params);
}

double member_mass(const FamilySpec& spec, std::size_t j) {
  switch (spec.kind) {
    case FamilyKind::Schwarzschild:
    case FamilyKind::Perturbed: return spec.schedule.at(j);
    default: return 0.0;
  }
}

GraphManifold build_member(const FamilySpec& spec, std::size_t j) {
  const double v = spec.schedule.at(j);
  switch (spec.kind) {
    case FamilyKind::Schwarzschild: return make_schwarzschild(spec.n, v, spec.params, spec.grid);
    case FamilyKind::Perturbed: {
      const double inner = spec.inner_fraction * v;
      const double rh = horizon_radius(spec.n, inner);
      if (rh >= spec.params.r0 / 2.0) throw ValidationError("inner horizon radius is not below r0/2");
      ProfileSpec s;
      s.kind = "shell";
      s.params = {{"mass", v}, {"inner_mass", inner}, {"shell_inner", spec.shell_inner}, {"shell_outer", spec.shell_outer}};
      GraphManifold base = GraphManifold::from_profile(
          GraphDomain::make(spec.n, spec.grid.spacing, spec.grid.outer_radius, rh), Profile::make(spec.n, s),
          spec.params);
      return make_perturbed(base, spec.bump, spec.member.curvature);
    }
    case FamilyKind::ThinWell: return make_thin_well(spec.n, spec.well_depth, v, spec.params, spec.grid);
    case FamilyKind::Flat: return make_flat(spec.n, spec.params, spec.grid);
  }
  throw ValidationError("unknown family kind");
}

MemberValidation validate_member(const GraphManifold& g, double m, const MemberTolerances& tol, int stencil_radius) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const ClassParameters& p = g.params();
  MemberValidation v;
  auto fail = [&](const std::string& why) {
    v.ok = false;
    v.failures.push_back(why);
  };

  double f_min = std::numeric_limits<double>::infinity();
  double f_edge = std::numeric_limits<double>::infinity();
  std::size_t worst_gradient = 0;
  const Profile* prof = g.profile();
  const auto lambda = prof ? prof->asymptotic_constant() : std::nullopt;
  v.decay_checked = lambda.has_value() && (m == 0.0 || n == 3 || n == 4);
  v.decay_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    if (!g.active(i)) continue;
    const Index k = d.index(i);
    const Vec x = d.position(k);
    const double r = norm(x, n);
    f_min = std::min(f_min, g.height(i));
    for (int a = 0; a < n; ++a)
      if (std::abs(k[a]) == d.half()) f_edge = std::min(f_edge, g.height(i));
    Differentials dd;
    if (!try_differentials(g, i, DerivativeMode::Auto, &dd)) continue;
    const double grad = norm(dd.gradient, n);
    if (r >= p.r0 / 2.0 && grad > v.max_gradient) {
      v.max_gradient = grad;
      worst_gradient = i;
    }
    if (d.has_hole() && r < d.hole_radius + 2.0 * d.spacing) v.collar_gradient = std::max(v.collar_gradient, grad);
    if (v.decay_checked && r >= p.r0) {
      const double dev = std::abs(g.height(i) - (*lambda + schwarzschild_or_zero(n, m, r)));
      v.decay_excess = std::max(v.decay_excess, dev - p.gamma * std::pow(r, p.alpha));
    }
  }
  if (!v.decay_checked) v.decay_excess = 0.0;
  if (v.max_gradient > p.gamma * (1.0 + tol.gradient)) {
    std::ostringstream msg;
    msg << "|Df| = " << v.max_gradient << " exceeds gamma = " << p.gamma << " at "
        << point_text(d.position(worst_gradient), n);
    fail(msg.str());
  }
  if (v.decay_checked && v.decay_excess > 1e-12) {
    std::ostringstream msg;
    msg << "asymptotic decay bound exceeded by " << v.decay_excess;
    fail(msg.str());
  }

  const DepthResult dr = depth(g, p.r0, stencil_radius);
  v.depth = dr.depth;
  if (v.depth > p.depth * (1.0 + tol.depth)) {
    std::ostringstream msg;
    msg << "depth " << v.depth << " exceeds D = " << p.depth;
    fail(msg.str());
  }

  const PenroseMargin pm = penrose_check(g, m);
  v.penrose_margin = pm.margin;
  v.penrose_threshold = pm.threshold;
  if (pm.margin < -std::max(1e-12, tol.penrose * pm.threshold)) {
    std::ostringstream msg;
    msg << "Penrose margin " << pm.margin << " is negative";
    fail(msg.str());
  }

  v.min_mean_curvature = std::numeric_limits<double>::infinity();
  if (f_edge - f_min > 1e-9 * std::max(1.0, std::abs(f_min))) {
    LevelSetOptions opts;
    opts.curvature = true;
    for (int k = 0; k < tol.levels; ++k) {
      const double h = f_min + (f_edge - f_min) * (k + 0.5) / tol.levels;
      const LevelSetProfile ls = extract_level_set(g, h, opts);
      if (ls.facets == 0) continue;
      ++v.levels_checked;
      v.min_mean_curvature = std::min(v.min_mean_curvature, ls.min_mean_curvature);
    }
  }
  if (v.levels_checked == 0) v.min_mean_curvature = 0.0;
  if (v.min_mean_curvature < -tol.mean_curvature) {
    std::ostringstream msg;
    msg << "sampled level set not mean convex: min H = " << v.min_mean_curvature;
    fail(msg.str());
  }
  return v;
}

H0Result zoom_h0(const GraphManifold& g, double m, int resolution) {
  if (m <= 0.0) {
    H0Result r;
    r.note = "massless member: no normalization";
    return r;
  }
  const int n = g.dim();
  const double threshold = h0_threshold(n, m);
  const double rho = std::pow(threshold / unit_sphere_area(n), 1.0 / (n - 1));
  const double hole = g.domain().hole_radius;
  const double half = std::max(2.5 * rho, hole + 4.0 * rho / resolution);
  const GraphDomain zoom = GraphDomain::make(n, rho / resolution, half, hole);
  return h0_height(g.resampled(zoom), m);
}

bool ConvergenceReport::all_passed() const {
  return std::all_of(trends.begin(), trends.end(), [](const TrendVerdict& t) { return t.passed; });
}

const TrendVerdict* ConvergenceReport::trend(const std::string& column) const {
  for (const TrendVerdict& t : trends)
    if (t.column == column) return &t;
  return nullptr;
}

namespace {

double pointed_volume(const GraphManifold& g, const Vec& x, double R, int stencil, double* reach, bool* included) {
  const std::size_t p = nearest_grid_node(g.domain(), x);
  if (!g.active(p)) throw ValidationError("pointed experiment point lies in the hole");
  const BallVolume b = intrinsic_ball_volume(g, p, R, stencil);
  if (b.escaped) throw NumericalError("intrinsic ball reaches the edge of the grid");
  const double slack = 2.0 * g.domain().spacing;
  const InclusionResult inc = ball_inclusion_check(g, p, R, R + slack, stencil);
  if (reach) *reach = inc.max_radius;
  if (included) *included = inc.included;
  return b.volume;
}

TrendVerdict monotone_trend(const std::string& column, const std::vector<double>& v, double step, double ratio) {
  TrendVerdict t;
  t.column = column;
  t.rule = "monotone";
  bool mono = true;
  std::ostringstream detail;
  for (std::size_t j = 1; j < v.size(); ++j)
    if (v[j] > v[j - 1] * (1.0 + step) + 1e-12) {
      mono = false;
      detail << "increase at step " << j << "; ";
    }
  t.value = v.front() != 0.0 ? v.back() / v.front() : 0.0;
  const bool small = v.front() == 0.0 ? v.back() == 0.0 : t.value < ratio;
  if (!small) detail << "final/initial " << t.value << " not below " << ratio;
  t.passed = mono && small;
  t.detail = detail.str();
  return t;
}

TrendVerdict final_below(const std::string& column, const std::vector<double>& v, double limit) {
  TrendVerdict t;
  t.column = column;
  t.rule = "final_below";
  t.value = v.back();
  t.passed = v.back() < limit;
  if (!t.passed) t.detail = "final value not below " + format_scalar(limit);
  return t;
}

}  // namespace

ConvergenceReport stability_experiment(const FamilySpec& spec) {
  validate_family_spec(spec);
  ConvergenceReport rep;
  rep.spec = spec;
  const int n = spec.n;
  const double r = spec.radius;
  const double euclid = ball_volume(n, r);
  const double boundary_mass = sphere_area(n, r);
  if (spec.ball_radius >= spec.grid.outer_radius - spec.params.r0)
    throw ValidationError("ball radius must be below r_max - r0");

  for (std::size_t j = 0; j < spec.schedule.size(); ++j) {
    const GraphManifold member = build_member(spec, j);
    MemberRecord row;
    row.index = j + 1;
    row.parameter = spec.schedule[j];
    row.mass = member_mass(spec, j);

    const H0Result h0 = zoom_h0(member, row.mass, spec.zoom_resolution);
    row.h0 = h0.height;
    row.h0_flagged = h0.flagged;
    const GraphManifold g = h0.flagged ? member : member.shifted(-h0.height);

    const MemberValidation val = validate_member(g, row.mass, spec.member, spec.stencil);
    if (!val.ok) {
      std::ostringstream msg;
      msg << "member " << row.index << " (" << row.parameter << ") fails class validation:";
      for (const std::string& f : val.failures) msg << ' ' << f << ';';
      throw ValidationError(msg.str());
    }
    row.depth = val.depth;
    row.penrose_margin = val.penrose_margin;
    row.min_mean_curvature = val.min_mean_curvature;
    row.max_gradient = val.max_gradient;

    row.slab_height = slab_height(g, r);
    row.volume = induced_volume(g, r);
    row.euclidean_volume = euclid;
    row.volume_deviation = std::abs(row.volume - euclid);

    const BoundaryMetric bm = boundary_pullback(g, r, spec.pullback_samples, spec.stencil, spec.ratio_tolerance);
    row.boundary_points = bm.size();
    double eps = 0.0;
    for (std::size_t i = 0; i < bm.distance.size(); ++i) eps = std::max(eps, std::abs(bm.distance[i] - bm.reference[i]));
    const auto dj = FiniteMetricSpace<double>::validate(bm.labels, bm.distance, 1e-9);
    const auto d0 = FiniteMetricSpace<double>::validate(bm.labels, bm.reference, 1e-9);
    row.epsilon = eps;
    row.lambda = ratio_bound(d0, dj);
    row.gh_bound = 2.0 * eps;
    row.flat_bound = flat_bound(n - 1, row.lambda, eps, boundary_mass).value();
    row.ratio_min = bm.min_ratio;
    row.ratio_max = bm.max_ratio;
    row.lipschitz_bound = bm.lipschitz_bound;
    row.ratios_within = bm.within_bounds;

    const DiameterResult dm = diameter(g, r, spec.exact_diameter, spec.stencil);
    row.diameter = dm.diameter;
    row.diameter_bound = dm.bound;

    Vec p{};
    p[0] = spec.params.r0;
    row.pointed_volume = pointed_volume(g, p, spec.ball_radius, spec.ball_stencil, nullptr, nullptr);
    const double eb = ball_volume(n, spec.ball_radius);
    row.pointed_deficit = std::abs(eb - row.pointed_volume) / eb;
    rep.rows.push_back(row);
  }

  auto column = [&](auto field) {
    std::vector<double> v;
    for (const MemberRecord& m : rep.rows) v.push_back(m.*field);
    return v;
  };
  TrendVerdict ratios{"pullback_ratio", "within", true, 0.0, ""};
  TrendVerdict diam{"diameter", "within", true, 0.0, ""};
  for (const MemberRecord& m : rep.rows) {
    if (!m.ratios_within) {
      ratios.passed = false;
      ratios.detail += "member " + std::to_string(m.index) + " outside window; ";
    }
    if (m.diameter > m.diameter_bound) {
      diam.passed = false;
      diam.detail += "member " + std::to_string(m.index) + " exceeds bound; ";
    }
  }
  rep.trends.push_back(ratios);
  rep.trends.push_back(diam);

  const double vb = euclid;
  switch (spec.kind) {
    case FamilyKind::Schwarzschild:
    case FamilyKind::Perturbed:
      for (auto [name, field] : std::vector<std::pair<std::string, double MemberRecord::*>>{
               {"slab_height", &MemberRecord::slab_height},
               {"volume_deviation", &MemberRecord::volume_deviation},
               {"epsilon", &MemberRecord::epsilon},
               {"gh_bound", &MemberRecord::gh_bound},
               {"flat_bound", &MemberRecord::flat_bound}})
        rep.trends.push_back(monotone_trend(name, column(field), spec.trend_step, spec.trend_ratio));
      rep.trends.push_back(final_below("pointed_deficit", column(&MemberRecord::pointed_deficit), spec.deficit_threshold));
      break;
    case FamilyKind::ThinWell: {
      TrendVerdict dt{"depth", "stable", true, 0.0, ""};
      for (const MemberRecord& m : rep.rows) {
        const double dev = std::abs(m.depth - spec.well_depth) / spec.well_depth;
        dt.value = std::max(dt.value, dev);
      }
      dt.passed = dt.value <= spec.depth_tolerance;
      if (!dt.passed) dt.detail = "depth drifts from D* by " + format_scalar(dt.value);
      rep.trends.push_back(dt);
      std::vector<double> rel;
      for (const MemberRecord& m : rep.rows) rel.push_back(m.volume_deviation / vb);
      rep.trends.push_back(final_below("relative_volume_deviation", rel, spec.deficit_threshold));
      break;
    }
    case FamilyKind::Flat: {
      TrendVerdict t{"deviation", "vanishing", true, 0.0, ""};
      // Exact zeros except the volume, which carries the quadrature error of the ball edge.
      double vol = 0.0;
      for (const MemberRecord& m : rep.rows) {
        t.value = std::max({t.value, std::abs(m.slab_height), m.epsilon, m.gh_bound, m.flat_bound});
        vol = std::max(vol, m.volume_deviation / vb);
      }
      t.passed = t.value <= 1e-9 && vol <= 1e-3;
      t.value = std::max(t.value, vol);
      rep.trends.push_back(t);
      break;
    }
  }
  return rep;
}

PointedReport pointed_ball_experiment(const FamilySpec& spec, double R, PointChoice choice) {
  validate_family_spec(spec);
  if (!(R > 0.0) || R >= spec.grid.outer_radius - spec.params.r0)
    throw ValidationError("ball radius must satisfy 0 < R < r_max - r0");
  if (choice == PointChoice::WellBottom && spec.kind != FamilyKind::ThinWell)
    throw ValidationError("well-bottom points exist only for thin-well families");
  PointedReport rep;
  rep.choice = choice;
  const double eb = ball_volume(spec.n, R);
  for (std::size_t j = 0; j < spec.schedule.size(); ++j) {
    const GraphManifold g = build_member(spec, j);
    PointedRow row;
    row.index = j + 1;
    row.parameter = spec.schedule[j];
    row.radius = R;
    row.euclidean = eb;
    if (choice == PointChoice::Sigma) row.point[0] = spec.params.r0;
    row.volume = pointed_volume(g, row.point, R, spec.ball_stencil, &row.max_reach, &row.included);
    row.deficit = std::abs(eb - row.volume) / eb;
    rep.rows.push_back(row);
  }
  bool mono = true;
  for (std::size_t j = 1; j < rep.rows.size(); ++j)
    // Once below the threshold, steps of the size of the grid error are not growth.
    if (rep.rows[j].deficit > rep.rows[j - 1].deficit * (1.0 + spec.trend_step) + 1e-12 &&
        rep.rows[j].deficit >= spec.deficit_threshold)
      mono = false;
  const bool small = rep.rows.back().deficit < spec.deficit_threshold;
  const bool included =
      std::all_of(rep.rows.begin(), rep.rows.end(), [](const PointedRow& r) { return r.included; });
  rep.converging = mono && small && included;
  std::ostringstream v;
  if (rep.converging) {
    v << "converging: final deficit " << format_scalar(rep.rows.back().deficit);
  } else {
    v << "non-converging:";
    if (!mono) v << " deficit grows along the schedule;";
    if (!small) v << " final deficit " << format_scalar(rep.rows.back().deficit) << " not below "
                  << format_scalar(spec.deficit_threshold) << ';';
    if (!included) v << " ball inclusion fails;";
  }
  rep.verdict = v.str();
  return rep;
}

}  // namespace afg
