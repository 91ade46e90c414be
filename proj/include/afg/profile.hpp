#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "afg/core.hpp"

namespace afg {

// ----------------------------------------------------------------
// Schwarzschild graph S_m(r): closed forms exist for n = 3 and n = 4.
// ----------------------------------------------------------------

/// Radius of the minimal boundary sphere, (2m)^(1/(n-2)).
double horizon_radius(int n, double m);

/// S_m(r). Throws ValidationError for n outside {3, 4}, m <= 0 or r below the horizon.
double schwarzschild_profile(int n, double m, double r);
double schwarzschild_slope(int n, double m, double r);
double schwarzschild_second(int n, double m, double r);

/// A rotationally symmetric height function phi(|x|) with two derivatives.
class RadialFunction {
 public:
  virtual ~RadialFunction() = default;
  virtual double value(double r) const = 0;
  virtual double d1(double r) const = 0;
  virtual double d2(double r) const = 0;
};

/// Compactly supported smooth bump  amplitude * exp(1 - 1/(1 - |x-c|^2/radius^2)).
struct Bump {
  Vec center{};
  double radius = 1.0;
  double amplitude = 0.0;
};

/// Serializable description of an analytic height function.
///
/// Kinds and their parameters:
///   flat          height
///   affine        c, a0..a3            f = c + sum a_i x_i
///   saddle        scale                f = scale * x0 * x1
///   paraboloid    curvature            f = curvature |x|^2 / 2
///   cone          slope                f = slope |x|
///   hemisphere    radius               f = sqrt(radius^2 - |x|^2)
///   corrugated    amplitude, frequency f = |x| - amplitude cos(frequency x0)
///   schwarzschild mass                 f = S_m(|x|)
///   shell         mass, inner_mass, shell_inner, shell_outer
///                 Schwarzschild of inner_mass inside shell_inner, of mass outside
///                 shell_outer, smooth nondecreasing mass function in between
///   thin_well     depth, width, r0     flat outside width, well of calibrated depth
struct ProfileSpec {
  std::string kind = "flat";
  std::map<std::string, double> params;
  std::vector<Bump> bumps;
  double offset = 0.0;

  double param(const std::string& key, double fallback) const;
  double required(const std::string& key) const;
};

class Profile {
 public:
  static std::shared_ptr<const Profile> make(int dim, const ProfileSpec& spec);

  int dim() const { return dim_; }
  const ProfileSpec& spec() const { return spec_; }

  double value(const Vec& x) const;
  Differentials differentials(const Vec& x) const;

  /// Base radial function, null for non-radial kinds. Ignores bumps and offset.
  const RadialFunction* radial() const { return radial_.get(); }
  bool rotationally_symmetric() const { return radial_ != nullptr && spec_.bumps.empty(); }

  /// Radius of the excised ball U implied by the profile (minimal boundary), if any.
  std::optional<double> hole_radius() const;
  /// ADM mass built into the profile, when it is asymptotically Schwarzschild or flat.
  std::optional<double> declared_mass() const;
  /// Constant Lambda with f - (Lambda + S_m) -> 0 at infinity.
  std::optional<double> asymptotic_constant() const;

  std::shared_ptr<const Profile> with_offset(double dz) const;
  std::shared_ptr<const Profile> with_bumps(const std::vector<Bump>& extra) const;

 private:
  Profile(int dim, ProfileSpec spec);

  double base_value(const Vec& x) const;
  Differentials base_differentials(const Vec& x) const;

  int dim_;
  ProfileSpec spec_;
  std::shared_ptr<const RadialFunction> radial_;
};

/// Radial arclength  integral of sqrt(1 + phi'^2)  over [a, b].
double radial_arclength(const RadialFunction& phi, double a, double b);

}  // namespace afg
