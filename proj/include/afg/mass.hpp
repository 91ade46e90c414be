#pragma once

#include <string>
#include <vector>

#include "afg/hypersurface.hpp"

namespace afg {

struct MassEstimate {
  std::vector<double> radii;
  std::vector<double> values;  // boundary integral m(r) at each radius
  double mass = 0.0;           // extrapolated limit
  double exponent = 1.0;       // p in m(r) = m + c r^(-p)
  double residual = 0.0;       // rms misfit of the extrapolation model
  double correction = 0.0;     // mass - m(r_last)
  bool diverging = false;
  std::string note;
};

struct MassOptions {
  DerivativeMode mode = DerivativeMode::Auto;
  int polar_nodes = 32;  // Gauss-Legendre nodes per polar angle; azimuth gets twice as many
};

/// Boundary integral of the mass flux over the sphere |x| = r.
double mass_integral(const GraphManifold& g, double r, const MassOptions& opts = {});

/// m(r) at each radius, then extrapolation in 1/r with a fitted exponent.
MassEstimate adm_mass(const GraphManifold& g, const std::vector<double>& radii, const MassOptions& opts = {});

struct LamIdentityReport {
  double height = 0.0;
  double mass = 0.0;
  double lhs = 0.0;
  double bulk = 0.0;
  double tail = 0.0;           // estimated bulk beyond the truncation radius, not included
  double boundary = 0.0;
  double residual = 0.0;
  double truncation_radius = 0.0;
  std::size_t skipped_nodes = 0;  // nodes above the level without a curvature stencil
  bool near_critical = false;
  bool empty_level = false;
  double relative_residual() const { return lhs != 0.0 ? residual / lhs : residual; }
};

/// 2(n-1) omega m = bulk scalar curvature over {f >= h} + weighted mean-curvature term on f = h.
LamIdentityReport lam_identity(const GraphManifold& g, double h, double mass,
                               DerivativeMode mode = DerivativeMode::Auto);

/// 2 omega_{n-1} (2m)^((n-1)/(n-2)).
double h0_threshold(int n, double m);

struct H0Result {
  double height = 0.0;
  double threshold = 0.0;
  double area = 0.0;  // level-set area at the returned height
  bool flagged = false;
  std::string note;
};

struct H0Options {
  int samples = 64;
  int bisection_steps = 40;
};

/// Largest sampled regular height whose level-set area stays below the threshold.
H0Result h0_height(const GraphManifold& g, double m, const H0Options& opts = {});

struct Normalized {
  GraphManifold manifold;
  H0Result h0;
};

/// f - h0. A flagged h0 leaves the manifold unchanged.
Normalized vertical_normalize(const GraphManifold& g, double m, const H0Options& opts = {});

struct PenroseMargin {
  double threshold = 0.0;
  double boundary_volume = 0.0;
  double margin = 0.0;
};

/// omega_{n-1} (2m)^((n-1)/(n-2)) - Vol(boundary). The boundary is the hole sphere.
PenroseMargin penrose_check(const GraphManifold& g, double m);

/// Max f over active nodes with |x| < r.
double slab_height(const GraphManifold& g, double r);
bool slab_check(const GraphManifold& g, double eps, double r);

/// Induced volumes of {f < 0} and {f >= 0} inside B(r).
VolumeSplit volume_split(const GraphManifold& g, double r);

}  // namespace afg
