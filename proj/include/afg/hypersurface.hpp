#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "afg/grid.hpp"

namespace afg {

/// Auto uses the analytic profile when the manifold carries one.
enum class DerivativeMode { Auto, Analytic, FiniteDifference };

/// Gradient and Hessian at a node. Finite differences are second order: central where
/// both neighbours exist, one-sided next to the grid boundary or the hole.
/// Throws NumericalError when no stencil fits, ValidationError for an inactive node.
Differentials differentials(const GraphManifold& g, std::size_t node, DerivativeMode mode = DerivativeMode::Auto);

/// Nonthrowing variant used by the field routines.
bool try_differentials(const GraphManifold& g, std::size_t node, DerivativeMode mode, Differentials* out);

/// V_j = sum_i (f_ii f_j - f_ij f_i) / (1 + |Df|^2); the scalar curvature is div V.
Vec reilly_vector(const Differentials& d, int n);

/// div V by central differences of V. Throws NumericalError if a neighbour lacks a stencil.
double scalar_curvature(const GraphManifold& g, std::size_t node, DerivativeMode mode = DerivativeMode::Auto);

struct CurvatureField {
  std::vector<double> values;  // NaN where not evaluated
  std::size_t evaluated = 0;
  std::size_t excluded = 0;        // active nodes in the window without a stencil
  double hole_collar = 0.0;        // widest gap between the hole and an excluded node
  double outer_margin = 0.0;       // outermost evaluated radius subtracted from r_max
};

/// Scalar curvature on every active node with r_min <= |x| <= r_max (window optional).
CurvatureField scalar_curvature_field(const GraphManifold& g, DerivativeMode mode = DerivativeMode::Auto,
                                      double r_min = 0.0, double r_max = -1.0);

/// Closed form for rotationally symmetric profiles: (n-1) r^(1-n) d/dr (r^(n-2) psi),
/// psi = phi'^2 / (1 + phi'^2).
double radial_scalar_curvature(const RadialFunction& phi, int n, double r);

// ----------------------------------------------------------------
// Level sets
// ----------------------------------------------------------------

struct LevelSetProfile {
  double height = 0.0;
  double area = 0.0;
  double clipped_area = 0.0;
  double mean_curvature_integral = 0.0;
  double weighted_term = 0.0;
  double min_gradient = 0.0;        // smallest piecewise-linear |Df| on the contour
  double min_mean_curvature = 0.0;  // over facets with curvature data
  double max_mean_curvature = 0.0;
  std::size_t facets = 0;
  std::size_t curvature_skipped = 0;
  bool out_of_range = false;        // no crossing at all
  bool near_critical = false;
  bool touches_boundary = false;    // contour reaches the outer box
  bool touches_hole = false;        // crossing cells cut by the hole were dropped
};

struct LevelSetOptions {
  std::optional<double> clip_radius;
  bool curvature = false;
  DerivativeMode mode = DerivativeMode::Auto;
};

/// Piecewise-linear contouring over the Kuhn triangulation of every grid cell.
LevelSetProfile extract_level_set(const GraphManifold& g, double h, const LevelSetOptions& opts = {});

/// Flags ride along in the profile; this returns only the (optionally clipped) area.
double level_set_area(const GraphManifold& g, double h, std::optional<double> clip_radius = std::nullopt);
LevelSetProfile level_set_mean_curvature(const GraphManifold& g, double h,
                                         DerivativeMode mode = DerivativeMode::Auto);

// ----------------------------------------------------------------
// Induced volume
// ----------------------------------------------------------------

struct VolumeSplit {
  double below = 0.0;  // f < level
  double above = 0.0;  // f >= level
  double total() const { return below + above; }
};

/// Integral of sqrt(1 + |Df|^2) over B(r) minus the hole, using the piecewise-linear
/// interpolant; cells cut by a sphere or the level are subsampled `subsample`^n times.
VolumeSplit induced_volume_split(const GraphManifold& g, double r, double level, int subsample = 8);
double induced_volume(const GraphManifold& g, double r, int subsample = 8);

/// Clipped level-set area at most the area of the sphere of radius r, up to rel_tol.
bool outward_area_clamp_check(const GraphManifold& g, double h, double r, double rel_tol = 1e-3);

}  // namespace afg
