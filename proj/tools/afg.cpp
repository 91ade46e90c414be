// afg: command-line front end for the graph geometry and gluing library.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "afg/convergence.hpp"
#include "afg/io.hpp"
#include "afg/parallel.hpp"
#include "json.hpp"

using namespace afg;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::vector<std::string> sets;
  std::string format = "csv";
  int threads = 1;
  bool exact = false;
  bool dry_run = false;
};

// Named output tables; "records" turns each into a JSON array of objects.
struct Output {
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, std::string>> files;  // verbatim artifacts
  std::vector<std::string> summary;
};

// ---------------------------------------------------------------- schemas

std::vector<KeySpec> manifold_keys() {
  std::vector<KeySpec> k = {
      {"n", ValueType::Integer, "3", "base dimension"},
      {"grid.spacing", ValueType::Real, "0.2", "grid spacing h"},
      {"grid.outer_radius", ValueType::Real, "5", "half width of the grid box"},
      {"grid.hole_radius", ValueType::Real, "", "hole radius; defaults to the profile's horizon"},
      {"profile.kind", ValueType::Text, "schwarzschild", "height function kind"},
      {"profile.offset", ValueType::Real, "0", "constant added to f"},
      {"bump", ValueType::RealList, "", "center coordinates, radius, amplitude"},
      {"class.r0", ValueType::Real, "2.5", "r0"},
      {"class.gamma", ValueType::Real, "2.5", "gradient bound"},
      {"class.depth", ValueType::Real, "5", "depth bound D"},
      {"class.alpha", ValueType::Real, "-0.5", "decay exponent"},
      {"derivatives", ValueType::Text, "auto", "auto, analytic or fd"},
  };
  for (const char* p : {"height", "c", "a0", "a1", "a2", "a3", "scale", "curvature", "slope", "radius", "amplitude",
                        "frequency", "mass", "inner_mass", "shell_inner", "shell_outer", "depth", "width", "r0"})
    k.push_back({std::string("profile.") + p, ValueType::Real, "", "profile parameter"});
  return k;
}

std::vector<KeySpec> family_keys() {
  return {
      {"family", ValueType::Text, "schwarzschild", "schwarzschild, perturbed, thin_well or flat"},
      {"n", ValueType::Integer, "3", "base dimension"},
      {"schedule", ValueType::RealList, "0.5,0.25,0.125,0.0625,0.03125,0.015625", "masses or well widths"},
      {"class.r0", ValueType::Real, "2.5", "r0"},
      {"class.gamma", ValueType::Real, "2.5", "gradient bound"},
      {"class.depth", ValueType::Real, "5", "depth bound D"},
      {"class.alpha", ValueType::Real, "-0.5", "decay exponent"},
      {"grid.spacing", ValueType::Real, "0.2", "grid spacing"},
      {"grid.outer_radius", ValueType::Real, "5", "grid half width"},
      {"radius", ValueType::Real, "4", "experiment radius r"},
      {"stencil", ValueType::Integer, "2", "lattice stencil radius for distances"},
      {"ball_stencil", ValueType::Integer, "3", "lattice stencil radius for ball volumes"},
      {"samples", ValueType::Integer, "48", "boundary direction samples"},
      {"exact_diameter", ValueType::Boolean, "false", "all-pairs diameter"},
      {"ball_radius", ValueType::Real, "1.5", "pointed ball radius R"},
      {"well_depth", ValueType::Real, "4", "thin-well depth D*"},
      {"shell_inner", ValueType::Real, "3", "perturbed family shell start"},
      {"shell_outer", ValueType::Real, "5", "perturbed family shell end"},
      {"inner_fraction", ValueType::Real, "0.5", "perturbed family inner mass fraction"},
      {"bump", ValueType::RealList, "", "perturbed family bump: center coordinates, radius, amplitude"},
      {"zoom_resolution", ValueType::Integer, "20", "h0 zoom grid resolution"},
      {"ratio_tolerance", ValueType::Real, "0.001", "pullback ratio slack"},
      {"trend_step", ValueType::Real, "0.02", "allowed relative increase per step"},
      {"trend_ratio", ValueType::Real, "0.15", "required final/initial ratio"},
      {"deficit_threshold", ValueType::Real, "0.05", "final relative deficit"},
      {"depth_tolerance", ValueType::Real, "0.05", "thin-well depth drift"},
      {"tol.mean_curvature", ValueType::Real, "0.05", "mean convexity slack"},
      {"tol.curvature", ValueType::Real, "0.02", "bump curvature slack"},
      {"tol.levels", ValueType::Integer, "6", "level sets sampled for mean convexity"},
      {"point", ValueType::Text, "sigma", "pointed experiment point: sigma or well_bottom"},
  };
}

std::vector<KeySpec> with(std::vector<KeySpec> base, std::vector<KeySpec> extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

DerivativeMode derivative_mode(const Config& c) {
  const std::string m = c.text("derivatives");
  if (m == "auto") return DerivativeMode::Auto;
  if (m == "analytic") return DerivativeMode::Analytic;
  if (m == "fd") return DerivativeMode::FiniteDifference;
  throw ValidationError("derivatives must be auto, analytic or fd");
}

Bump parse_bump(const std::vector<double>& v, int n) {
  if (static_cast<int>(v.size()) != n + 2) throw ValidationError("bump needs n center coordinates, radius, amplitude");
  Bump b;
  for (int a = 0; a < n; ++a) b.center[a] = v[a];
  b.radius = v[n];
  b.amplitude = v[n + 1];
  return b;
}

ClassParameters class_from(const Config& c) {
  ClassParameters p;
  p.r0 = c.real("class.r0");
  p.gamma = c.real("class.gamma");
  p.depth = c.real("class.depth");
  p.alpha = c.real("class.alpha");
  return p;
}

GraphManifold manifold_from(const Config& c) {
  const int n = c.integer("n");
  ProfileSpec s;
  s.kind = c.text("profile.kind");
  s.offset = c.real("profile.offset");
  for (const auto& [key, value] : c.values())
    if (key.rfind("profile.", 0) == 0 && key != "profile.kind" && key != "profile.offset")
      s.params[key.substr(8)] = parse_real(value, key);
  if (c.present("bump")) s.bumps.push_back(parse_bump(c.reals("bump"), n));
  auto profile = Profile::make(n, s);
  double hole = 0.0;
  if (c.present("grid.hole_radius"))
    hole = c.real("grid.hole_radius");
  else if (auto h = profile->hole_radius())
    hole = *h;
  derivative_mode(c);
  return GraphManifold::from_profile(GraphDomain::make(n, c.real("grid.spacing"), c.real("grid.outer_radius"), hole),
                                     profile, class_from(c));
}

FamilySpec family_from(const Config& c) {
  FamilySpec f;
  f.kind = parse_family_kind(c.text("family"));
  f.n = c.integer("n");
  f.schedule = c.reals("schedule");
  f.params = class_from(c);
  f.grid.spacing = c.real("grid.spacing");
  f.grid.outer_radius = c.real("grid.outer_radius");
  f.radius = c.real("radius");
  f.stencil = c.integer("stencil");
  f.ball_stencil = c.integer("ball_stencil");
  f.pullback_samples = c.integer("samples");
  f.exact_diameter = c.boolean("exact_diameter");
  f.ball_radius = c.real("ball_radius");
  f.well_depth = c.real("well_depth");
  f.shell_inner = c.real("shell_inner");
  f.shell_outer = c.real("shell_outer");
  f.inner_fraction = c.real("inner_fraction");
  if (c.present("bump")) f.bump = parse_bump(c.reals("bump"), f.n);
  f.zoom_resolution = c.integer("zoom_resolution");
  f.ratio_tolerance = c.real("ratio_tolerance");
  f.trend_step = c.real("trend_step");
  f.trend_ratio = c.real("trend_ratio");
  f.deficit_threshold = c.real("deficit_threshold");
  f.depth_tolerance = c.real("depth_tolerance");
  f.member.mean_curvature = c.real("tol.mean_curvature");
  f.member.curvature = c.real("tol.curvature");
  f.member.levels = c.integer("tol.levels");
  validate_family_spec(f);
  return f;
}

double manifold_mass(const GraphManifold& g, const Config& c) {
  if (c.present("mass")) return c.real("mass");
  if (g.profile())
    if (auto m = g.profile()->declared_mass()) return *m;
  throw ValidationError("mass is required for this profile");
}

// ---------------------------------------------------------------- commands

struct Command {
  std::string name;
  std::string help;
  std::vector<KeySpec> schema;
  // Parses and validates everything; returns the compute step.
  std::function<std::function<Output()>(const Config&, const Options&)> prepare;
};

std::vector<Command> commands() {
  std::vector<Command> cmds;

  cmds.push_back({"profile", "evaluate the Schwarzschild profile at radii",
                  {{"n", ValueType::Integer, "3", ""}, {"mass", ValueType::Real, "1", ""},
                   {"radii", ValueType::RealList, "2,3,4,5,10", ""}},
                  [](const Config& c, const Options&) {
                    const int n = c.integer("n");
                    const double m = c.real("mass");
                    const auto radii = c.reals("radii");
                    for (double r : radii) schwarzschild_profile(n, m, r);
                    return std::function<Output()>([=] {
                      Output o;
                      CsvTable t({"radius", "value", "slope", "second"});
                      for (double r : radii)
                        t.add({cell(r), cell(schwarzschild_profile(n, m, r)),
                               r > horizon_radius(n, m) ? cell(schwarzschild_slope(n, m, r)) : "inf",
                               r > horizon_radius(n, m) ? cell(schwarzschild_second(n, m, r)) : "-inf"});
                      o.tables.push_back({"profile", t});
                      return o;
                    });
                  }});

  cmds.push_back({"curvature", "scalar curvature field, binned by radius",
                  with(manifold_keys(), {{"r_min", ValueType::Real, "0", ""},
                                         {"r_max", ValueType::Real, "", "defaults to the grid half width"},
                                         {"bins", ValueType::Integer, "10", ""}}),
                  [](const Config& c, const Options&) {
                    GraphManifold g = manifold_from(c);
                    const DerivativeMode mode = derivative_mode(c);
                    const double r_min = c.real("r_min");
                    const double r_max = c.present("r_max") ? c.real("r_max") : g.domain().outer_radius;
                    const int bins = c.integer("bins");
                    if (bins < 1 || !(r_max > r_min)) throw ValidationError("need bins >= 1 and r_max > r_min");
                    return std::function<Output()>([=] {
                      const CurvatureField f = scalar_curvature_field(g, mode, r_min, r_max);
                      std::vector<std::size_t> count(bins, 0);
                      std::vector<double> lo(bins, 1e300), hi(bins, -1e300), sum(bins, 0.0);
                      const GraphDomain& d = g.domain();
                      for (std::size_t i = 0; i < f.values.size(); ++i) {
                        if (std::isnan(f.values[i])) continue;
                        const double r = norm(d.position(i), d.dim);
                        int b = static_cast<int>((r - r_min) / (r_max - r_min) * bins);
                        b = std::clamp(b, 0, bins - 1);
                        ++count[b];
                        lo[b] = std::min(lo[b], f.values[i]);
                        hi[b] = std::max(hi[b], f.values[i]);
                        sum[b] += f.values[i];
                      }
                      Output o;
                      CsvTable t({"bin_inner", "bin_outer", "nodes", "min", "max", "mean"});
                      for (int b = 0; b < bins; ++b) {
                        const double a = r_min + (r_max - r_min) * b / bins, e = r_min + (r_max - r_min) * (b + 1) / bins;
                        if (count[b] == 0)
                          t.add({cell(a), cell(e), cell(std::size_t{0}), "nan", "nan", "nan"});
                        else
                          t.add({cell(a), cell(e), cell(count[b]), cell(lo[b]), cell(hi[b]), cell(sum[b] / count[b])});
                      }
                      o.tables.push_back({"curvature", t});
                      CsvTable s({"evaluated", "excluded", "hole_collar", "outer_margin"});
                      s.add({cell(f.evaluated), cell(f.excluded), cell(f.hole_collar), cell(f.outer_margin)});
                      o.tables.push_back({"curvature_summary", s});
                      return o;
                    });
                  }});

  cmds.push_back({"mass", "boundary mass integrals and extrapolated ADM mass",
                  with(manifold_keys(), {{"radii", ValueType::RealList, "1,2,3", ""},
                                         {"polar_nodes", ValueType::Integer, "32", ""}}),
                  [](const Config& c, const Options&) {
                    GraphManifold g = manifold_from(c);
                    MassOptions opts;
                    opts.mode = derivative_mode(c);
                    opts.polar_nodes = c.integer("polar_nodes");
                    const auto radii = c.reals("radii");
                    return std::function<Output()>([=] {
                      const MassEstimate e = adm_mass(g, radii, opts);
                      Output o;
                      CsvTable t({"radius", "m_r"});
                      for (std::size_t i = 0; i < e.radii.size(); ++i) t.add({cell(e.radii[i]), cell(e.values[i])});
                      o.tables.push_back({"mass", t});
                      CsvTable s({"mass", "exponent", "residual", "correction", "diverging", "note"});
                      s.add({cell(e.mass), cell(e.exponent), cell(e.residual), cell(e.correction), cell(e.diverging),
                             e.note});
                      o.tables.push_back({"mass_summary", s});
                      o.summary.push_back("mass " + cell(e.mass));
                      return o;
                    });
                  }});

  cmds.push_back({"lam", "level-set mass identity residual",
                  with(manifold_keys(), {{"level", ValueType::Real, "", "height h"},
                                         {"mass", ValueType::Real, "", "defaults to the profile mass"}}),
                  [](const Config& c, const Options&) {
                    GraphManifold g = manifold_from(c);
                    const DerivativeMode mode = derivative_mode(c);
                    const double level = c.real("level");
                    const double m = manifold_mass(g, c);
                    return std::function<Output()>([=] {
                      const LamIdentityReport r = lam_identity(g, level, m, mode);
                      Output o;
                      CsvTable t({"height", "mass", "lhs", "bulk", "boundary", "residual", "relative_residual", "tail",
                                  "truncation_radius", "skipped_nodes", "near_critical", "empty_level"});
                      t.add({cell(r.height), cell(r.mass), cell(r.lhs), cell(r.bulk), cell(r.boundary), cell(r.residual),
                             cell(r.relative_residual()), cell(r.tail), cell(r.truncation_radius), cell(r.skipped_nodes),
                             cell(r.near_critical), cell(r.empty_level)});
                      o.tables.push_back({"lam", t});
                      o.summary.push_back("relative residual " + cell(r.relative_residual()));
                      return o;
                    });
                  }});

  cmds.push_back({"h0", "height below which level sets stay under the area threshold",
                  with(manifold_keys(), {{"mass", ValueType::Real, "", "defaults to the profile mass"},
                                         {"zoom", ValueType::Boolean, "true", "use a dedicated grid around the neck"},
                                         {"zoom_resolution", ValueType::Integer, "20", ""}}),
                  [](const Config& c, const Options&) {
                    GraphManifold g = manifold_from(c);
                    const double m = manifold_mass(g, c);
                    const bool zoom = c.boolean("zoom");
                    const int res = c.integer("zoom_resolution");
                    return std::function<Output()>([=] {
                      const H0Result r = zoom ? zoom_h0(g, m, res) : h0_height(g, m);
                      Output o;
                      CsvTable t({"height", "threshold", "area", "flagged", "note"});
                      t.add({cell(r.height), cell(r.threshold), cell(r.area), cell(r.flagged), r.note});
                      o.tables.push_back({"h0", t});
                      o.summary.push_back("h0 " + cell(r.height));
                      return o;
                    });
                  }});

  cmds.push_back({"depth", "intrinsic depth of the region inside Sigma(r0)",
                  with(manifold_keys(), {{"stencil", ValueType::Integer, "2", ""}}),
                  [](const Config& c, const Options&) {
                    GraphManifold g = manifold_from(c);
                    const int s = c.integer("stencil");
                    return std::function<Output()>([=] {
                      const DepthResult r = depth(g, g.params().r0, s);
                      Output o;
                      CsvTable t({"r0", "depth", "at_hole", "sources", "band_width"});
                      t.add({cell(g.params().r0), cell(r.depth), cell(r.at_hole), cell(r.sources), cell(r.band_width)});
                      o.tables.push_back({"depth", t});
                      o.summary.push_back("depth " + cell(r.depth));
                      return o;
                    });
                  }});

  cmds.push_back({"pullback", "boundary pullback metric on Sigma(r)",
                  with(manifold_keys(), {{"radius", ValueType::Real, "4", ""},
                                         {"samples", ValueType::Integer, "48", ""},
                                         {"stencil", ValueType::Integer, "2", ""},
                                         {"tolerance", ValueType::Real, "0.001", ""}}),
                  [](const Config& c, const Options&) {
                    GraphManifold g = manifold_from(c);
                    const double r = c.real("radius");
                    const int samples = c.integer("samples"), s = c.integer("stencil");
                    const double tol = c.real("tolerance");
                    return std::function<Output()>([=] {
                      const BoundaryMetric bm = boundary_pullback(g, r, samples, s, tol);
                      Output o;
                      CsvTable t({"i", "j", "distance", "reference", "chord"});
                      const std::size_t k = bm.size();
                      for (std::size_t i = 0; i < k; ++i)
                        for (std::size_t j = i + 1; j < k; ++j)
                          t.add({cell(i), cell(j), cell(bm.at(i, j)), cell(bm.reference[i * k + j]), cell(bm.chord[i * k + j])});
                      o.tables.push_back({"pullback", t});
                      double eps = 0.0;
                      for (std::size_t i = 0; i < bm.distance.size(); ++i)
                        eps = std::max(eps, std::abs(bm.distance[i] - bm.reference[i]));
                      CsvTable sm({"points", "min_ratio", "max_ratio", "lipschitz_bound", "within_bounds", "epsilon"});
                      sm.add({cell(k), cell(bm.min_ratio), cell(bm.max_ratio), cell(bm.lipschitz_bound),
                              cell(bm.within_bounds), cell(eps)});
                      o.tables.push_back({"pullback_summary", sm});
                      return o;
                    });
                  }});

  auto glue_outputs = [](auto a, auto b, int t_count, auto eps, Output& o) {
    using S = std::decay_t<decltype(a(0, 0))>;
    const GluedSpace<S> z = glue(a, b, t_count, eps);
    o.files.push_back({"glued.txt", glued_space_text(z)});
    const auto m = z.matrix();
    const MetricCheck chk = check_metric(z.size(), m);
    CsvTable t({"points", "levels", "epsilon", "sup_difference", "hausdorff_bottom_top", "gh_bound", "metric_ok",
                "violation"});
    const S haus = z.levels().size() > 1 ? hausdorff_distance(z, z.bottom(), z.top()) : S(0);
    t.add({cell(z.size()), cell(z.levels().size()), format_scalar(z.epsilon()), format_scalar(uniform_distance(a, b)),
           format_scalar(haus), format_scalar(S(2) * z.epsilon()), cell(chk.ok), chk.ok ? "" : chk.reason});
    o.tables.push_back({"glue", t});
  };

  cmds.push_back({"glue", "glue two metrics on a common set along [-eps, eps]",
                  {{"input_a", ValueType::Text, "", "metric file"},
                   {"input_b", ValueType::Text, "", "metric file"},
                   {"fixture_k", ValueType::Integer, "", "use the swap example with truncation k instead of files"},
                   {"t_count", ValueType::Integer, "5", ""},
                   {"epsilon", ValueType::Scalar, "", "override, at least sup |d_a - d_b|"}},
                  [glue_outputs](const Config& c, const Options& opt) {
                    const int t_count = c.integer("t_count");
                    if (c.present("fixture_k")) {
                      const int k = c.integer("fixture_k");
                      const NoncompleteFixture f = noncomplete_fixture(k, t_count);
                      return std::function<Output()>([=] {
                        Output o;
                        std::optional<Rational> eps = c.present("epsilon") ? std::optional<Rational>(parse_rational(c.text("epsilon"), "epsilon"))
                                                                           : std::optional<Rational>(f.report.eps_used);
                        glue_outputs(f.a, f.b, t_count, eps, o);
                        const NoncompleteReport& r = f.report;
                        CsvTable m({"k", "eps_truncated", "eps_used", "mid_pairs", "mid_slice_exact", "min_cross_bound",
                                    "cross_bounds_hold", "limit_margin", "min_positive_gap", "limit_excluded"});
                        m.add({cell(r.k), format_scalar(r.eps_truncated), format_scalar(r.eps_used),
                               cell(r.mid_pairs_checked), cell(r.mid_slice_exact), format_scalar(r.min_cross_bound),
                               cell(r.cross_bounds_hold), format_scalar(r.limit_margin), format_scalar(r.min_positive_gap),
                               cell(r.limit_excluded)});
                        o.tables.push_back({"margin", m});
                        return o;
                      });
                    }
                    const std::string pa = c.text("input_a"), pb = c.text("input_b");
                    if (opt.exact) {
                      auto a = load_metric_space<Rational>(pa), b = load_metric_space<Rational>(pb);
                      std::optional<Rational> eps;
                      if (c.present("epsilon")) eps = parse_rational(c.text("epsilon"), "epsilon");
                      return std::function<Output()>([=] {
                        Output o;
                        glue_outputs(a, b, t_count, eps, o);
                        return o;
                      });
                    }
                    auto a = load_metric_space<double>(pa), b = load_metric_space<double>(pb);
                    std::optional<double> eps;
                    if (c.present("epsilon")) eps = parse_real(c.text("epsilon"), "epsilon");
                    return std::function<Output()>([=] {
                      Output o;
                      glue_outputs(a, b, t_count, eps, o);
                      return o;
                    });
                  }});

  cmds.push_back({"bounds", "Gromov-Hausdorff and flat distance bounds",
                  {{"dimension", ValueType::Integer, "2", "dimension of the current"},
                   {"lambda", ValueType::Scalar, "1", ""},
                   {"epsilon", ValueType::Scalar, "", ""},
                   {"mass", ValueType::Scalar, "", "mass of the current"}},
                  [](const Config& c, const Options& opt) {
                    const int n = c.integer("dimension");
                    auto emit = [n](auto lambda, auto eps, auto mass) {
                      using S = decltype(lambda);
                      const FlatBound<S> fb = flat_bound(n, lambda, eps, mass);
                      Output o;
                      CsvTable t({"dimension", "lambda", "epsilon", "mass", "gh_bound", "flat_bound", "flat_rational_part",
                                  "flat_sqrt2", "filling_mass", "rescaled_mass"});
                      t.add({cell(n), format_scalar(lambda), format_scalar(eps), format_scalar(mass),
                             format_scalar(S(2) * eps), cell(fb.value()), format_scalar(fb.rational_part), cell(fb.sqrt2),
                             format_scalar(product_filling_mass(eps, mass)), format_scalar(mass_rescale(mass, lambda, n))});
                      o.tables.push_back({"bounds", t});
                      return o;
                    };
                    if (opt.exact) {
                      const Rational l = parse_rational(c.text("lambda"), "lambda"),
                                     e = parse_rational(c.text("epsilon"), "epsilon"),
                                     m = parse_rational(c.text("mass"), "mass");
                      flat_bound(n, l, e, m);
                      mass_rescale(m, l, n);
                      return std::function<Output()>([=] { return emit(l, e, m); });
                    }
                    const double l = c.real("lambda"), e = c.real("epsilon"), m = c.real("mass");
                    flat_bound(n, l, e, m);
                    mass_rescale(m, l, n);
                    return std::function<Output()>([=] { return emit(l, e, m); });
                  }});

  cmds.push_back({"experiment", "stability experiment over a family", family_keys(),
                  [](const Config& c, const Options& opt) {
                    const FamilySpec f = family_from(c);
                    const std::string out = opt.out;
                    return std::function<Output()>([=] {
                      const ConvergenceReport r = stability_experiment(f);
                      Output o;
                      o.files.push_back({"report.csv", report_csv(r)});
                      o.files.push_back({"trends.csv", trends_csv(r)});
                      o.files.push_back({"report.json", report_records(r)});
                      write_series(r, join_path(out, "series"));
                      for (const TrendVerdict& t : r.trends)
                        o.summary.push_back(t.column + " " + t.rule + " " + (t.passed ? "ok" : "FAILED") + " " +
                                            cell(t.value));
                      return o;
                    });
                  }});

  cmds.push_back({"pointed", "intrinsic ball volumes at Sigma(r0) or at a well bottom", family_keys(),
                  [](const Config& c, const Options&) {
                    const FamilySpec f = family_from(c);
                    const std::string p = c.text("point");
                    if (p != "sigma" && p != "well_bottom") throw ValidationError("point must be sigma or well_bottom");
                    const PointChoice choice = p == "sigma" ? PointChoice::Sigma : PointChoice::WellBottom;
                    if (choice == PointChoice::WellBottom && f.kind != FamilyKind::ThinWell)
                      throw ValidationError("well-bottom points exist only for thin-well families");
                    return std::function<Output()>([=] {
                      const PointedReport r = pointed_ball_experiment(f, f.ball_radius, choice);
                      Output o;
                      o.files.push_back({"pointed.csv", pointed_csv(r)});
                      o.files.push_back({"pointed.json", pointed_records(r)});
                      o.summary.push_back(r.verdict);
                      return o;
                    });
                  }});

  cmds.push_back({"fixtures", "emit the swap example whose glued space is not complete",
                  {{"k", ValueType::Integer, "4", "truncation"}, {"t_count", ValueType::Integer, "5", ""}},
                  [](const Config& c, const Options&) {
                    const int k = c.integer("k"), t = c.integer("t_count");
                    noncomplete_fixture(k, t);
                    return std::function<Output()>([=] {
                      const NoncompleteFixture f = noncomplete_fixture(k, t);
                      Output o;
                      o.files.push_back({"fixture_a.txt", metric_space_text(f.a)});
                      o.files.push_back({"fixture_b.txt", metric_space_text(f.b)});
                      o.files.push_back({"fixture_glued.txt", glued_space_text(f.glued)});
                      const NoncompleteReport& r = f.report;
                      CsvTable m({"k", "eps_truncated", "eps_used", "mid_pairs", "mid_slice_exact", "min_cross_bound",
                                  "cross_bounds_hold", "limit_margin", "min_positive_gap", "limit_excluded"});
                      m.add({cell(r.k), format_scalar(r.eps_truncated), format_scalar(r.eps_used),
                             cell(r.mid_pairs_checked), cell(r.mid_slice_exact), format_scalar(r.min_cross_bound),
                             cell(r.cross_bounds_hold), format_scalar(r.limit_margin), format_scalar(r.min_positive_gap),
                             cell(r.limit_excluded)});
                      o.tables.push_back({"margin", m});
                      CsvTable tail({"i", "distance_to_next"});
                      for (std::size_t i = 0; i < r.tail_distances.size(); ++i)
                        tail.add({cell(i + 1), format_scalar(r.tail_distances[i])});
                      o.tables.push_back({"sequence", tail});
                      return o;
                    });
                  }});
  return cmds;
}

std::string table_records(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  auto split = [](const std::string& l) {
    std::vector<std::string> v;
    std::stringstream s(l);
    std::string x;
    while (std::getline(s, x, ',')) v.push_back(x);
    if (!l.empty() && l.back() == ',') v.push_back("");
    return v;
  };
  std::getline(in, line);
  header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    nlohmann::ordered_json row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

int run(const Command& cmd, const Options& opt) {
  Config cfg = opt.config.empty() ? Config{} : Config::load(opt.config);
  for (const std::string& s : opt.sets) cfg.assign(s);
  cfg.check(cmd.schema);
  cfg.bind(cmd.schema);
  if (opt.format != "csv" && opt.format != "records") throw ValidationError("format must be csv or records");
  if (opt.threads < 1) throw ValidationError("threads must be at least 1");
  set_thread_count(opt.threads);
  auto compute = cmd.prepare(cfg, opt);
  if (opt.dry_run) {
    std::cout << cmd.name << ": configuration ok\n";
    return 0;
  }
  ensure_directory(opt.out);
  const Output o = compute();
  for (const auto& [name, table] : o.tables) {
    if (opt.format == "csv")
      write_file(join_path(opt.out, name + ".csv"), table.str());
    else
      write_file(join_path(opt.out, name + ".json"), table_records(table.str()));
  }
  for (const auto& [name, content] : o.files) write_file(join_path(opt.out, name), content);
  for (const std::string& s : o.summary) std::cout << s << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry of asymptotically flat graphs and metric gluing bounds"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<Command> cmds = commands();
  std::map<CLI::App*, const Command*> bySub;
  for (const Command& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "key = value configuration file");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--set", opt.sets, "override a key: --set key=value")->take_all();
    sub->add_option("--format", opt.format, "csv or records")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads")->capture_default_str();
    sub->add_flag("--exact", opt.exact, "rational arithmetic for metric computations");
    sub->add_flag("--dry-run", opt.dry_run, "validate the configuration and stop");
    bySub[sub] = &c;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  const Command* cmd = nullptr;
  for (auto& [sub, c] : bySub)
    if (sub->parsed()) cmd = c;
  try {
    return run(*cmd, opt);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
