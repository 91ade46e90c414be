#pragma once

#include <string>
#include <vector>

#include "afg/geodesics.hpp"
#include "afg/mass.hpp"

namespace afg {

enum class FamilyKind { Schwarzschild, Perturbed, ThinWell, Flat };

FamilyKind parse_family_kind(const std::string& name);
std::string family_kind_name(FamilyKind kind);

struct GridSpec {
  double spacing = 0.2;
  double outer_radius = 5.0;
};

struct MemberTolerances {
  double gradient = 1e-9;        // relative slack on |Df| <= gamma
  double depth = 1e-9;           // relative slack on depth <= D
  double penrose = 1e-9;         // relative to the threshold, absolute floor 1e-12
  double mean_curvature = 0.05;  // H >= -tol on sampled level sets
  double curvature = 0.02;       // R >= -tol inside a bump window
  int levels = 6;                // level sets sampled for mean convexity
};

/// Everything needed to generate and evaluate one family.
struct FamilySpec {
  FamilyKind kind = FamilyKind::Schwarzschild;
  int n = 3;
  std::vector<double> schedule;  // masses m_j, or well widths w_j for thin wells
  ClassParameters params{2.5, 2.5, 5.0, -0.5, 0.0};
  GridSpec grid;
  double radius = 4.0;         // experiment radius r
  int stencil = 2;             // lattice stencil for depth, pullback and diameter
  int ball_stencil = 3;        // stencil for ball volumes
  int pullback_samples = 48;
  bool exact_diameter = false;
  double ball_radius = 1.5;    // R of the pointed experiment
  double well_depth = 4.0;     // D* of thin wells
  double shell_inner = 3.0;    // perturbed family: shell bounds and inner mass fraction
  double shell_outer = 5.0;
  double inner_fraction = 0.5;
  Bump bump{{4.0, 0.0, 0.0, 0.0}, 0.6, 5e-4};
  int zoom_resolution = 20;    // h0 zoom grid: rho* / spacing
  double ratio_tolerance = 1e-3;
  double trend_step = 0.02;    // allowed relative increase per step
  double trend_ratio = 0.15;   // required final / initial
  double deficit_threshold = 0.05;
  double depth_tolerance = 0.05;
  MemberTolerances member;
};

/// Throws ValidationError on inconsistent specs (empty or non-monotone schedule, bad sizes).
void validate_family_spec(const FamilySpec& spec);

ClassParameters class_parameters(const FamilySpec& spec);

GraphManifold make_schwarzschild(int n, double m, const ClassParameters& params, const GridSpec& grid);
/// Adds a bump to an analytic base. The bump must sit where the base curvature is positive
/// and the result must keep R >= -curvature_tol on the bump support.
GraphManifold make_perturbed(const GraphManifold& base, const Bump& bump, double curvature_tol = 0.02);
/// Flat outside |x| = w, a well of radial arclength depth measured from |x| = r0.
/// depth = 0 gives the flat graph.
GraphManifold make_thin_well(int n, double depth, double width, const ClassParameters& params, const GridSpec& grid);
GraphManifold make_flat(int n, const ClassParameters& params, const GridSpec& grid);

/// Member j of the family, before normalization.
GraphManifold build_member(const FamilySpec& spec, std::size_t j);
/// Mass carried by member j.
double member_mass(const FamilySpec& spec, std::size_t j);

struct MemberValidation {
  bool ok = true;
  std::vector<std::string> failures;
  double max_gradient = 0.0;    // over active nodes with |x| >= r0/2
  double collar_gradient = 0.0; // over active nodes within two cells of the hole
  double decay_excess = 0.0;    // max over |x| >= r0 of |f - (Lambda + S_m)| - gamma |x|^alpha
  bool decay_checked = false;
  double depth = 0.0;
  double penrose_margin = 0.0;
  double penrose_threshold = 0.0;
  double min_mean_curvature = 0.0;
  int levels_checked = 0;
  bool outward_minimizing_assumed = true;
};

MemberValidation validate_member(const GraphManifold& g, double m, const MemberTolerances& tol = {},
                                 int stencil_radius = 2);

/// h0 on a dedicated grid around the neck: spacing rho*/resolution, half width 2.5 rho*,
/// rho* the radius of the sphere whose area is the threshold. Massless members give 0.
H0Result zoom_h0(const GraphManifold& g, double m, int resolution = 20);

struct MemberRecord {
  std::size_t index = 0;
  double parameter = 0.0;
  double mass = 0.0;
  double h0 = 0.0;
  bool h0_flagged = false;
  double slab_height = 0.0;
  double volume = 0.0;
  double euclidean_volume = 0.0;
  double volume_deviation = 0.0;
  double depth = 0.0;
  double epsilon = 0.0;
  double lambda = 1.0;
  double gh_bound = 0.0;
  double flat_bound = 0.0;
  double diameter = 0.0;
  double diameter_bound = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double lipschitz_bound = 0.0;
  bool ratios_within = true;
  double penrose_margin = 0.0;
  double min_mean_curvature = 0.0;
  double max_gradient = 0.0;
  double pointed_volume = 0.0;
  double pointed_deficit = 0.0;  // relative to the Euclidean ball
  std::size_t boundary_points = 0;
};

struct TrendVerdict {
  std::string column;
  std::string rule;  // monotone, final_below, stable, vanishing
  bool passed = true;
  double value = 0.0;  // ratio, final value or worst deviation depending on the rule
  std::string detail;
};

struct ConvergenceReport {
  FamilySpec spec;
  std::vector<MemberRecord> rows;
  std::vector<TrendVerdict> trends;
  bool all_passed() const;
  const TrendVerdict* trend(const std::string& column) const;
};

ConvergenceReport stability_experiment(const FamilySpec& spec);

enum class PointChoice { Sigma, WellBottom };

struct PointedRow {
  std::size_t index = 0;
  double parameter = 0.0;
  double radius = 0.0;
  double volume = 0.0;
  double euclidean = 0.0;
  double deficit = 0.0;
  bool included = true;
  double max_reach = 0.0;
  Vec point{};
};

struct PointedReport {
  PointChoice choice = PointChoice::Sigma;
  std::vector<PointedRow> rows;
  bool converging = false;
  std::string verdict;
};

/// Ball volumes at p_j above r0 e_0 (Sigma) or at the origin (WellBottom).
PointedReport pointed_ball_experiment(const FamilySpec& spec, double R, PointChoice choice = PointChoice::Sigma);

}  // namespace afg
