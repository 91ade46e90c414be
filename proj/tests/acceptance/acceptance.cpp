// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "afg/convergence.hpp"
#include "afg/io.hpp"
#include "afg/metricspace.hpp"
#include "afg/parallel.hpp"

using namespace afg;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const Outcome& o) {
  std::printf("AC%d %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GraphManifold from_kind(const std::string& kind, std::map<std::string, double> params, double h, double box,
                        double hole) {
  ProfileSpec s;
  s.kind = kind;
  s.params = std::move(params);
  return GraphManifold::from_profile(GraphDomain::make(3, h, box, hole), Profile::make(3, s), {});
}

double max_abs(const CurvatureField& f, double shift = 0.0) {
  double w = 0.0;
  for (double v : f.values)
    if (!std::isnan(v)) w = std::max(w, std::abs(v - shift));
  return w;
}

// |f'''| + |f''|/r + |f'|/r^2: the sizes of the terms making up D^3 of a radial function.
double third_derivative_scale(double m, double r_min, double r_max) {
  double s = 0.0;
  for (double r = r_min; r <= r_max + 1e-12; r += 0.01) {
    const double d = 1e-4;
    const double f3 = (schwarzschild_second(3, m, r + d) - schwarzschild_second(3, m, r - d)) / (2 * d);
    s = std::max(s, std::abs(f3) + std::abs(schwarzschild_second(3, m, r)) / r +
                        std::abs(schwarzschild_slope(3, m, r)) / (r * r));
  }
  return s;
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> widths;
  for (double h : {0.2, 0.1}) {
    auto g = from_kind("schwarzschild", {{"mass", 1.0}}, h, 10.4, 2.0);
    widths.push_back(max_abs(scalar_curvature_field(g, DerivativeMode::FiniteDifference, 3.0, 10.0)));
  }
  const double scale = third_derivative_scale(1.0, 3.0, 10.0);
  double hemi = 0.0;
  for (double h : {0.02, 0.01}) {
    auto g = from_kind("hemisphere", {{"radius", 1.0}}, h, 0.55, 0.0);
    hemi = max_abs(scalar_curvature_field(g, DerivativeMode::FiniteDifference, 0.0, 0.5), 6.0) / 6.0;
  }
  const double t = seconds_since(t0);
  const double ratio = widths[0] / widths[1];
  Outcome o;
  o.pass = ratio >= 1.8 && widths[1] <= 0.02 * scale && hemi <= 0.03 && t <= 30.0;
  o.detail = "max|R| " + fmt("%.3g", widths[0]) + " -> " + fmt("%.3g", widths[1]) + " (ratio " + fmt("%.2f", ratio) +
             "), 0.02*scale " + fmt("%.3g", 0.02 * scale) + ", hemisphere rel err " + fmt("%.2e", hemi) + ", " +
             fmt("%.1f", t) + " s";
  return o;
}

Outcome ac2() {
  Outcome o;
  MassOptions opts;
  opts.mode = DerivativeMode::FiniteDifference;
  for (double m : {0.25, 1.0}) {
    auto g = from_kind("schwarzschild", {{"mass", m}}, 1.0, 84.0, 2 * m);
    const MassEstimate e = adm_mass(g, {20, 40, 80}, opts);
    const double rel = std::abs(e.mass - m) / m;
    o.pass = o.pass && rel <= 0.05;
    o.detail += "m=" + fmt("%g", m) + " -> " + fmt("%.6g", e.mass) + " (rel " + fmt("%.1e", rel) + "); ";
  }
  auto flat = from_kind("flat", {}, 1.0, 84.0, 0.0);
  const MassEstimate e = adm_mass(flat, {20, 40, 80}, opts);
  bool zero = e.mass == 0.0;
  for (double v : e.values) zero = zero && v == 0.0;
  o.pass = o.pass && zero;
  o.detail += std::string("flat ") + (zero ? "exactly 0" : "nonzero");
  return o;
}

Outcome ac3() {
  Outcome o;
  auto schw = from_kind("schwarzschild", {{"mass", 1.0}}, 0.1, 6.0, 2.0);
  const LamIdentityReport s = lam_identity(schw, schwarzschild_profile(3, 1.0, 4.0), 1.0, DerivativeMode::FiniteDifference);
  o.pass = s.relative_residual() < 0.03;
  std::vector<double> residuals;
  for (double h : {0.1, 0.05}) {
    ProfileSpec spec;
    spec.kind = "shell";
    spec.params = {{"mass", 1.0}, {"inner_mass", 0.5}, {"shell_inner", 3.0}, {"shell_outer", 5.0}};
    spec.bumps.push_back(Bump{{4, 0, 0, 0}, 0.6, 5e-4});
    auto g = GraphManifold::from_profile(GraphDomain::make(3, h, 6.0, 1.0), Profile::make(3, spec), {});
    const LamIdentityReport r =
        lam_identity(g, schwarzschild_profile(3, 0.5, 2.5), 1.0, DerivativeMode::FiniteDifference);
    residuals.push_back(std::abs(r.residual));
  }
  const double ratio = residuals[0] / residuals[1];
  o.pass = o.pass && ratio >= 1.8;
  o.detail = "Schwarzschild relative residual " + fmt("%.2e", s.relative_residual()) + ", perturbed residual " +
             fmt("%.3g", residuals[0]) + " -> " + fmt("%.3g", residuals[1]) + " (ratio " + fmt("%.2f", ratio) + ")";
  return o;
}

Outcome ac4() {
  Outcome o;
  for (double m : {0.1, 0.5, 1.0}) {
    auto g = from_kind("schwarzschild", {{"mass", m}}, 0.2, 5.0, 2 * m);
    const H0Result r = zoom_h0(g, m);
    const double exact = 4 * m * std::sqrt(std::sqrt(2.0) - 1);
    const double rel = std::abs(r.height / exact - 1);
    o.pass = o.pass && !r.flagged && rel <= 0.02;
    o.detail += "m=" + fmt("%g", m) + " rel " + fmt("%.1e", rel) + "; ";
  }
  return o;
}

Outcome ac5(const std::vector<const ConvergenceReport*>& reports) {
  Outcome o;
  const double m = 1.0;
  auto g = from_kind("schwarzschild", {{"mass", m}}, 0.2, 5.0, horizon_radius(3, m));
  const PenroseMargin p = penrose_check(g, m);
  const double rel = std::abs(p.margin) / p.threshold;
  o.pass = rel <= 0.02;
  double worst = 1e300;
  std::size_t members = 0;
  for (const ConvergenceReport* r : reports)
    for (const MemberRecord& row : r->rows) {
      const double tol = row.mass > 0.0 ? std::max(1e-12, 1e-9 * h0_threshold(3, row.mass)) : 1e-12;
      o.pass = o.pass && row.penrose_margin >= -tol;
      worst = std::min(worst, row.penrose_margin);
      ++members;
    }
  o.detail = "horizon fixture |margin|/threshold " + fmt("%.1e", rel) + ", min member margin " + fmt("%.4g", worst) +
             " over " + std::to_string(members) + " members";
  return o;
}

std::vector<long long> random_integer_metric(std::mt19937_64& rng, std::size_t n, long long max_weight) {
  std::uniform_int_distribution<long long> w(1, max_weight);
  std::vector<long long> d(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = w(rng);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

// Random rational metrics: an integer metric over a random common denominator.
FiniteMetricSpace<Rational> random_space(std::mt19937_64& rng, std::size_t n) {
  const auto d = random_integer_metric(rng, n, 20);
  const long long q = 1 + static_cast<long long>(rng() % 6);
  std::vector<Rational> m;
  for (long long v : d) m.emplace_back(v, q);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
  return FiniteMetricSpace<Rational>::validate(labels, m);
}

Rational pow_rational(const Rational& x, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

struct GluingTally {
  int instances = 0;
  long long triangle_violations = 0;
  long long isometry_failures = 0;
  long long bound_failures = 0;
  long long hausdorff_failures = 0;
  long long flat_failures = 0;
  long long rescale_failures = 0;
  double seconds = 0.0;
};

GluingTally random_gluings() {
  GluingTally t;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const int T = 2 + static_cast<int>(rng() % 6);
    auto A = random_space(rng, n), B = random_space(rng, n), R = random_space(rng, n);
    const GluedSpace<Rational> z = glue(A, B, T);
    const auto m = z.matrix();
    const std::size_t N = z.size();
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k)
          if (m[i * N + k] > m[i * N + j] + m[j * N + k]) ++t.triangle_violations;
    if (z.levels().size() > 1) {
      const auto bottom = z.bottom(), top = z.top();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (z.distance(bottom[i], bottom[j]) != A(i, j)) ++t.isometry_failures;
          if (z.distance(top[i], top[j]) != B(i, j)) ++t.isometry_failures;
        }
      if (hausdorff_distance(z, bottom, top) > Rational(2) * z.epsilon()) ++t.hausdorff_failures;
    }
    const Rational lambda = std::max(ratio_bound(R, A), ratio_bound(R, B));
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = 0; q < N; ++q)
        if (m[p * N + q] > abs_value(Rational(z.t(p) - z.t(q))) + lambda * R(z.point_of(p), z.point_of(q)))
          ++t.bound_failures;

    // Independent evaluation of the flat bound and the rescaling law.
    const int dim = 1 + static_cast<int>(rng() % 4);
    const Rational M(1 + static_cast<long long>(rng() % 9), 1 + static_cast<long long>(rng() % 4));
    const FlatBound<Rational> fb = flat_bound(dim, lambda, z.epsilon(), M);
    const Rational expected = pow_rational(Rational(2), (dim + 1) / 2) * pow_rational(lambda, dim + 1) *
                              Rational(2) * z.epsilon() * M;
    if (fb.rational_part != expected || fb.sqrt2 != ((dim + 1) % 2 == 1)) ++t.flat_failures;
    if (mass_rescale(M, lambda, dim) != M * pow_rational(lambda, dim)) ++t.rescale_failures;
    ++t.instances;
  }
  t.seconds = seconds_since(t0);
  return t;
}

Outcome ac6(const GluingTally& t) {
  Outcome o;
  o.pass = t.instances >= 200 && t.triangle_violations == 0 && t.isometry_failures == 0 && t.bound_failures == 0 &&
           t.seconds <= 60.0;
  o.detail = std::to_string(t.instances) + " exact instances, triangle violations " +
             std::to_string(t.triangle_violations) + ", isometry failures " + std::to_string(t.isometry_failures) +
             ", bound failures " + std::to_string(t.bound_failures) + ", " + fmt("%.1f", t.seconds) + " s";
  return o;
}

Outcome ac7(const GluingTally& t) {
  Outcome o;
  o.pass = t.instances >= 200 && t.hausdorff_failures == 0 && t.flat_failures == 0 && t.rescale_failures == 0;
  o.detail = "hausdorff > 2eps: " + std::to_string(t.hausdorff_failures) + ", flat bound mismatches: " +
             std::to_string(t.flat_failures) + ", rescale mismatches: " + std::to_string(t.rescale_failures);
  return o;
}

Outcome ac8() {
  Outcome o;
  Rational previous(0);
  for (int k = 3; k <= 8; ++k) {
    const NoncompleteFixture f = noncomplete_fixture(k);
    const NoncompleteReport& r = f.report;
    const bool ok = r.eps_truncated > previous && r.eps_truncated == Rational(1) - Rational(2, 1LL << k) &&
                    r.mid_slice_exact && r.cross_bounds_hold && r.min_cross_bound >= Rational(1) && r.limit_excluded;
    o.pass = o.pass && ok;
    previous = r.eps_truncated;
  }
  o.detail = "eps_8 = " + format_scalar(previous) + ", mid-slice distances exact, cross-slice bounds >= 1";
  return o;
}

Outcome ac9(const std::vector<const ConvergenceReport*>& reports) {
  Outcome o;
  std::size_t members = 0;
  double lo = 1e300, hi = 0.0, diam_slack = 1e300;
  for (const ConvergenceReport* r : reports) {
    const double gamma = r->spec.params.gamma;
    const double upper = 2 * std::sqrt(1 + gamma * gamma) + 1e-3;
    for (const MemberRecord& row : r->rows) {
      o.pass = o.pass && row.ratio_min >= 1 - 1e-3 && row.ratio_max <= upper && row.diameter <= row.diameter_bound;
      lo = std::min(lo, row.ratio_min);
      hi = std::max(hi, row.ratio_max / upper);
      diam_slack = std::min(diam_slack, row.diameter_bound - row.diameter);
      ++members;
    }
  }
  o.detail = std::to_string(members) + " members, min ratio " + fmt("%.5f", lo) + ", max ratio/upper " +
             fmt("%.3f", hi) + ", min diameter slack " + fmt("%.3f", diam_slack);
  return o;
}

std::string verdict_text(const TrendVerdict* t) {
  if (!t) return "missing";
  return t->column + " " + (t->passed ? "ok" : "FAILED") + " (" + fmt("%.4g", t->value) + ")";
}

Outcome ac10(const ConvergenceReport& schw, const ConvergenceReport& well, const PointedReport& bottom,
             double seconds) {
  Outcome o;
  std::string failed;
  for (const char* column : {"slab_height", "volume_deviation", "epsilon", "gh_bound", "flat_bound", "pointed_deficit"}) {
    const TrendVerdict* t = schw.trend(column);
    o.detail += verdict_text(t) + "; ";
    if (!t || !t->passed) {
      o.pass = false;
      failed += std::string(failed.empty() ? "" : ", ") + column;
    }
  }
  for (const char* column : {"depth", "relative_volume_deviation"}) {
    const TrendVerdict* t = well.trend(column);
    o.detail += "well " + verdict_text(t) + "; ";
    if (!t || !t->passed) {
      o.pass = false;
      failed += std::string(failed.empty() ? "" : ", ") + "well " + column;
    }
  }
  o.detail += "well bottom " + std::string(bottom.converging ? "converging" : "non-converging") + "; ";
  if (bottom.converging) {
    o.pass = false;
    failed += std::string(failed.empty() ? "" : ", ") + "well bottom";
  }
  o.detail += fmt("%.0f", seconds) + " s";
  if (seconds > 300.0) {
    o.pass = false;
    failed += std::string(failed.empty() ? "" : ", ") + "runtime";
  }
  if (!failed.empty()) o.detail = "failed: " + failed + " | " + o.detail;
  return o;
}

FamilySpec small_family() {
  FamilySpec s;
  s.schedule = {0.5, 0.25, 0.125};
  s.grid.spacing = 0.25;
  s.grid.outer_radius = 4.5;
  s.radius = 3.5;
  s.pullback_samples = 24;
  return s;
}

Outcome ac11() {
  const FamilySpec spec = small_family();
  set_thread_count(1);
  const ConvergenceReport a = stability_experiment(spec);
  const std::string first = report_csv(a) + trends_csv(a);
  set_thread_count(3);
  const ConvergenceReport b = stability_experiment(spec);
  const std::string second = report_csv(b) + trends_csv(b);
  set_thread_count(1);
  const std::string glued1 = glued_space_text(noncomplete_fixture(6).glued);
  const std::string glued2 = glued_space_text(noncomplete_fixture(6).glued);
  Outcome o;
  o.pass = first == second && glued1 == glued2;
  o.detail = "experiment CSV (" + std::to_string(first.size()) + " bytes, 1 vs 3 threads) " +
             (first == second ? "identical" : "differs") + ", glued fixture text " +
             (glued1 == glued2 ? "identical" : "differs");
  return o;
}

}  // namespace

int main() {
  set_thread_count(1);
  report(1, ac1());
  report(2, ac2());
  report(3, ac3());
  report(4, ac4());

  const auto t0 = std::chrono::steady_clock::now();
  FamilySpec schw_spec;
  schw_spec.schedule = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const ConvergenceReport schw = stability_experiment(schw_spec);

  FamilySpec well_spec;
  well_spec.kind = FamilyKind::ThinWell;
  well_spec.schedule = {1.6, 0.8, 0.4};
  well_spec.params.r0 = 2.0;
  well_spec.grid.spacing = 0.1;
  well_spec.grid.outer_radius = 3.6;
  well_spec.radius = 3.0;
  const ConvergenceReport well = stability_experiment(well_spec);
  const PointedReport bottom = pointed_ball_experiment(well_spec, well_spec.ball_radius, PointChoice::WellBottom);
  const double seconds = seconds_since(t0);

  FamilySpec pert_spec;
  pert_spec.kind = FamilyKind::Perturbed;
  pert_spec.schedule = {1.0, 0.5};
  pert_spec.params.r0 = 3.0;
  pert_spec.grid.outer_radius = 6.0;
  pert_spec.radius = 5.5;
  const ConvergenceReport pert = stability_experiment(pert_spec);

  FamilySpec flat_spec;
  flat_spec.kind = FamilyKind::Flat;
  flat_spec.schedule = {0.0};
  const ConvergenceReport flat = stability_experiment(flat_spec);

  const std::vector<const ConvergenceReport*> all{&schw, &well, &pert, &flat};
  report(5, ac5(all));
  const GluingTally tally = random_gluings();
  report(6, ac6(tally));
  report(7, ac7(tally));
  report(8, ac8());
  report(9, ac9(all));
  report(10, ac10(schw, well, bottom, seconds));
  report(11, ac11());
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
