#include "afg/profile.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace afg {

namespace {

void require_schwarzschild_dim(int n) {
  if (n != 3 && n != 4) {
    throw ValidationError("Schwarzschild profile has a closed form only for n = 3 and n = 4 (got n = " +
                          std::to_string(n) + ")");
  }
}

double sq(double v) { return v * v; }

// ---------------------------------------------------------------- radial kinds

class SchwarzschildRadial final : public RadialFunction {
 public:
  SchwarzschildRadial(int n, double m) : n_(n), m_(m), horizon_(horizon_radius(n, m)) {}
  double value(double r) const override { return r <= horizon_ ? 0.0 : schwarzschild_profile(n_, m_, r); }
  double d1(double r) const override { return schwarzschild_slope(n_, m_, r); }
  double d2(double r) const override { return schwarzschild_second(n_, m_, r); }

 private:
  int n_;
  double m_;
  double horizon_;
};

class PowerRadial final : public RadialFunction {
 public:
  enum class Shape { Paraboloid, Cone, Hemisphere };
  PowerRadial(Shape s, double c) : shape_(s), c_(c) {}
  double value(double r) const override {
    switch (shape_) {
      case Shape::Paraboloid: return 0.5 * c_ * r * r;
      case Shape::Cone: return c_ * r;
      case Shape::Hemisphere: return std::sqrt(std::max(0.0, c_ * c_ - r * r));
    }
    return 0.0;
  }
  double d1(double r) const override {
    switch (shape_) {
      case Shape::Paraboloid: return c_ * r;
      case Shape::Cone: return c_;
      case Shape::Hemisphere: return -r / std::sqrt(c_ * c_ - r * r);
    }
    return 0.0;
  }
  double d2(double r) const override {
    switch (shape_) {
      case Shape::Paraboloid: return c_;
      case Shape::Cone: return 0.0;
      case Shape::Hemisphere: return -c_ * c_ / std::pow(c_ * c_ - r * r, 1.5);
    }
    return 0.0;
  }

 private:
  Shape shape_;
  double c_;
};

// C-infinity step from 0 at t <= 0 to 1 at t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double g = 1.0 / t - 1.0 / (1.0 - t);
  if (g > 700.0) return 0.0;
  if (g < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(g));
}

double smooth_step_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = smooth_step(t);
  return s * (1.0 - s) * (1.0 / (t * t) + 1.0 / sq(1.0 - t));
}

// Graph of a rotationally symmetric metric with mass function mu(r), rising smoothly
// from inner_mass to mass across [a, b]. Scalar curvature is (n-1) r^(1-n) 2 mu'(r) >= 0.
class ShellRadial final : public RadialFunction {
 public:
  ShellRadial(int n, double mass, double inner_mass, double a, double b)
      : n_(n), m_(mass), m_in_(inner_mass), a_(a), b_(b) {
    require_schwarzschild_dim(n);
    if (!(b > a) || !(a > 0.0)) throw ValidationError("shell: need 0 < shell_inner < shell_outer");
    if (!(mass >= inner_mass) || inner_mass < 0.0 || mass <= 0.0)
      throw ValidationError("shell: need 0 <= inner_mass <= mass, mass > 0");
    if (inner_mass > 0.0 && horizon_radius(n, inner_mass) >= a)
      throw ValidationError("shell: inner horizon must lie inside shell_inner");
    constexpr int kIntervals = 4000;
    step_ = (b_ - a_) / kIntervals;
    table_.resize(kIntervals + 1);
    table_[0] = inner(a_);
    for (int i = 0; i < kIntervals; ++i) {
      const double lo = a_ + i * step_;
      const double piece = boost::math::quadrature::gauss<double, 10>::integrate(
          [this](double r) { return mid_d1(r); }, lo, lo + step_);
      table_[i + 1] = table_[i] + piece;
    }
    outer_shift_ = table_.back() - schwarzschild_profile(n_, m_, b_);
    for (int i = 0; i <= kIntervals; ++i) {
      const double r = a_ + i * step_;
      if (psi(r) >= 1.0) throw ValidationError("shell: mass function reaches the horizon inside the shell");
    }
  }

  double value(double r) const override {
    if (r <= a_) return inner(r);
    if (r >= b_) return outer_shift_ + schwarzschild_profile(n_, m_, r);
    // Cubic Hermite interpolation on the quadrature table.
    const double u = (r - a_) / step_;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), table_.size() - 2);
    const double t = u - static_cast<double>(i);
    const double r0 = a_ + i * step_;
    const double p0 = table_[i], p1 = table_[i + 1];
    const double m0 = mid_d1(r0) * step_, m1 = mid_d1(r0 + step_) * step_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
  }

  double d1(double r) const override {
    if (r <= a_) return m_in_ > 0.0 ? schwarzschild_slope(n_, m_in_, r) : 0.0;
    if (r >= b_) return schwarzschild_slope(n_, m_, r);
    return mid_d1(r);
  }

  double d2(double r) const override {
    if (r <= a_) return m_in_ > 0.0 ? schwarzschild_second(n_, m_in_, r) : 0.0;
    if (r >= b_) return schwarzschild_second(n_, m_, r);
    const double p = psi(r);
    const double slope = mid_d1(r);
    if (slope == 0.0) return 0.0;
    const double dpsi = 2.0 * mu_d1(r) / std::pow(r, n_ - 2) - 2.0 * (n_ - 2) * mu(r) / std::pow(r, n_ - 1);
    return dpsi / (2.0 * slope * sq(1.0 - p));
  }

  double mu(double r) const { return m_in_ + (m_ - m_in_) * smooth_step((r - a_) / (b_ - a_)); }
  double mu_d1(double r) const { return (m_ - m_in_) * smooth_step_d1((r - a_) / (b_ - a_)) / (b_ - a_); }

 private:
  double psi(double r) const { return 2.0 * mu(r) / std::pow(r, n_ - 2); }
  double mid_d1(double r) const {
    const double p = psi(r);
    return std::sqrt(p / (1.0 - p));
  }
  double inner(double r) const {
    if (m_in_ <= 0.0) return 0.0;
    return r <= horizon_radius(n_, m_in_) ? 0.0 : schwarzschild_profile(n_, m_in_, r);
  }

  int n_;
  double m_, m_in_, a_, b_;
  double step_ = 0.0;
  double outer_shift_ = 0.0;
  std::vector<double> table_;
};

// phi(r) = -A (1 - (r/w)^2)^4 inside r < w, zero outside; A calibrated so the radial
// arclength from |x| = r0 down to the bottom equals the requested depth.
class ThinWellRadial final : public RadialFunction {
 public:
  ThinWellRadial(double depth, double width, double r0) : w_(width) {
    if (depth == 0.0) return;  // no well: flat graph
    if (!(width > 0.0) || width > r0) throw ValidationError("thin_well: need 0 < width <= r0");
    if (depth < r0) throw ValidationError("thin_well: depth below r0 cannot be realized (flat depth is r0)");
    auto total = [&](double amp) {
      amplitude_ = amp;
      return (r0 - w_) + radial_arclength(*this, 0.0, w_) - depth;
    };
    if (total(0.0) >= 0.0) {
      amplitude_ = 0.0;
      return;
    }
    double hi = depth;
    while (total(hi) < 0.0) hi *= 2.0;
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto root = boost::math::tools::toms748_solve(total, 0.0, hi, tol, iters);
    amplitude_ = 0.5 * (root.first + root.second);
  }

  double value(double r) const override {
    if (r >= w_ || amplitude_ == 0.0) return 0.0;
    const double s = 1.0 - sq(r / w_);
    return -amplitude_ * sq(sq(s));
  }
  double d1(double r) const override {
    if (r >= w_ || amplitude_ == 0.0) return 0.0;
    const double q = r / w_;
    const double s = 1.0 - q * q;
    return 8.0 * amplitude_ * q * s * s * s / w_;
  }
  double d2(double r) const override {
    if (r >= w_ || amplitude_ == 0.0) return 0.0;
    const double q = r / w_;
    const double s = 1.0 - q * q;
    return 8.0 * amplitude_ / (w_ * w_) * s * s * (1.0 - 7.0 * q * q);
  }
  double amplitude() const { return amplitude_; }

 private:
  double w_;
  double amplitude_ = 0.0;
};

Differentials radial_differentials(const RadialFunction& phi, const Vec& x, int n) {
  Differentials d;
  const double r = norm(x, n);
  if (r == 0.0) {
    const double c = phi.d2(0.0);
    for (int i = 0; i < n; ++i) d.h(i, i) = (phi.d1(0.0) == 0.0) ? c : 0.0;
    return d;
  }
  const double p1 = phi.d1(r), p2 = phi.d2(r);
  for (int i = 0; i < n; ++i) {
    const double ui = x[i] / r;
    d.gradient[i] = p1 * ui;
    for (int j = 0; j < n; ++j) {
      const double uj = x[j] / r;
      d.h(i, j) = p2 * ui * uj + (p1 / r) * ((i == j ? 1.0 : 0.0) - ui * uj);
    }
  }
  return d;
}

void add_bump(const Bump& b, const Vec& x, int n, double* value, Differentials* diff) {
  Vec y{};
  for (int i = 0; i < n; ++i) y[i] = x[i] - b.center[i];
  const double rho2 = b.radius * b.radius;
  const double q = norm2(y, n) / rho2;
  if (q >= 1.0) return;
  const double u = 1.0 / (1.0 - q);
  const double beta = std::exp(1.0 - u);
  if (value) *value += b.amplitude * beta;
  if (diff) {
    const double dq = -beta * u * u;
    const double ddq = beta * (u * u * u * u - 2.0 * u * u * u);
    for (int i = 0; i < n; ++i) {
      diff->gradient[i] += b.amplitude * dq * 2.0 * y[i] / rho2;
      for (int j = 0; j < n; ++j) {
        diff->h(i, j) += b.amplitude * (ddq * 4.0 * y[i] * y[j] / (rho2 * rho2) + (i == j ? dq * 2.0 / rho2 : 0.0));
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Schwarzschild

double horizon_radius(int n, double m) {
  require_schwarzschild_dim(n);
  return std::pow(2.0 * m, 1.0 / (n - 2));
}

double schwarzschild_profile(int n, double m, double r) {
  require_schwarzschild_dim(n);
  if (!(m > 0.0)) throw ValidationError("Schwarzschild profile requires m > 0");
  const double rh = horizon_radius(n, m);
  if (r < rh) {
    std::ostringstream msg;
    msg << "radius " << r << " lies below the horizon radius " << rh;
    throw ValidationError(msg.str());
  }
  if (n == 3) return std::sqrt(8.0 * m * (r - 2.0 * m));
  const double a = std::sqrt(2.0 * m);
  return a * std::log(r / a + std::sqrt(std::max(0.0, r * r / (2.0 * m) - 1.0)));
}

double schwarzschild_slope(int n, double m, double r) {
  require_schwarzschild_dim(n);
  if (n == 3) return std::sqrt(2.0 * m / (r - 2.0 * m));
  return std::sqrt(2.0 * m) / std::sqrt(r * r - 2.0 * m);
}

double schwarzschild_second(int n, double m, double r) {
  require_schwarzschild_dim(n);
  if (n == 3) return -0.5 * std::sqrt(2.0 * m) * std::pow(r - 2.0 * m, -1.5);
  return -std::sqrt(2.0 * m) * r * std::pow(r * r - 2.0 * m, -1.5);
}

double radial_arclength(const RadialFunction& phi, double a, double b) {
  if (b <= a) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([&](double r) { return std::sqrt(1.0 + sq(phi.d1(r))); }, a, b);
}

// ---------------------------------------------------------------- ProfileSpec

double ProfileSpec::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double ProfileSpec::required(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ValidationError("profile '" + kind + "' requires parameter '" + key + "'");
  return it->second;
}

// ---------------------------------------------------------------- Profile

Profile::Profile(int dim, ProfileSpec spec) : dim_(dim), spec_(std::move(spec)) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("profile dimension must be in [1, 4]");
  const std::string& k = spec_.kind;
  if (k == "schwarzschild") {
    require_schwarzschild_dim(dim);
    const double m = spec_.required("mass");
    if (!(m > 0.0)) throw ValidationError("schwarzschild: mass must be positive");
    radial_ = std::make_shared<SchwarzschildRadial>(dim, m);
  } else if (k == "shell") {
    radial_ = std::make_shared<ShellRadial>(dim, spec_.required("mass"), spec_.param("inner_mass", 0.0),
                                            spec_.required("shell_inner"), spec_.required("shell_outer"));
  } else if (k == "thin_well") {
    radial_ = std::make_shared<ThinWellRadial>(spec_.required("depth"), spec_.required("width"), spec_.required("r0"));
    spec_.params["amplitude"] = static_cast<const ThinWellRadial&>(*radial_).amplitude();
  } else if (k == "paraboloid") {
    radial_ = std::make_shared<PowerRadial>(PowerRadial::Shape::Paraboloid, spec_.param("curvature", 1.0));
  } else if (k == "cone") {
    radial_ = std::make_shared<PowerRadial>(PowerRadial::Shape::Cone, spec_.param("slope", 1.0));
  } else if (k == "hemisphere") {
    radial_ = std::make_shared<PowerRadial>(PowerRadial::Shape::Hemisphere, spec_.param("radius", 1.0));
  } else if (k != "flat" && k != "affine" && k != "saddle" && k != "corrugated") {
    throw ValidationError("unknown profile kind '" + k + "'");
  }
}

std::shared_ptr<const Profile> Profile::make(int dim, const ProfileSpec& spec) {
  return std::shared_ptr<const Profile>(new Profile(dim, spec));
}

double Profile::base_value(const Vec& x) const {
  const int n = dim_;
  if (radial_) return radial_->value(norm(x, n));
  const std::string& k = spec_.kind;
  if (k == "flat") return spec_.param("height", 0.0);
  if (k == "affine") {
    double v = spec_.param("c", 0.0);
    for (int i = 0; i < n; ++i) v += spec_.param("a" + std::to_string(i), 0.0) * x[i];
    return v;
  }
  if (k == "saddle") return spec_.param("scale", 1.0) * x[0] * x[1];
  // corrugated
  return norm(x, n) - spec_.param("amplitude", 0.1) * std::cos(spec_.param("frequency", 10.0) * x[0]);
}

Differentials Profile::base_differentials(const Vec& x) const {
  const int n = dim_;
  if (radial_) return radial_differentials(*radial_, x, n);
  Differentials d;
  const std::string& k = spec_.kind;
  if (k == "affine") {
    for (int i = 0; i < n; ++i) d.gradient[i] = spec_.param("a" + std::to_string(i), 0.0);
  } else if (k == "saddle") {
    const double s = spec_.param("scale", 1.0);
    d.gradient[0] = s * x[1];
    d.gradient[1] = s * x[0];
    d.h(0, 1) = d.h(1, 0) = s;
  } else if (k == "corrugated") {
    const double a = spec_.param("amplitude", 0.1), w = spec_.param("frequency", 10.0);
    const double r = norm(x, n);
    for (int i = 0; i < n; ++i) {
      d.gradient[i] = r > 0.0 ? x[i] / r : 0.0;
      for (int j = 0; j < n; ++j) {
        if (r > 0.0) d.h(i, j) = ((i == j ? 1.0 : 0.0) - x[i] * x[j] / (r * r)) / r;
      }
    }
    d.gradient[0] += a * w * std::sin(w * x[0]);
    d.h(0, 0) += a * w * w * std::cos(w * x[0]);
  }
  return d;
}

double Profile::value(const Vec& x) const {
  double v = base_value(x) + spec_.offset;
  for (const Bump& b : spec_.bumps) add_bump(b, x, dim_, &v, nullptr);
  return v;
}

Differentials Profile::differentials(const Vec& x) const {
  Differentials d = base_differentials(x);
  for (const Bump& b : spec_.bumps) add_bump(b, x, dim_, nullptr, &d);
  return d;
}

std::optional<double> Profile::hole_radius() const {
  if (spec_.kind == "schwarzschild") return horizon_radius(dim_, spec_.required("mass"));
  if (spec_.kind == "shell" && spec_.param("inner_mass", 0.0) > 0.0)
    return horizon_radius(dim_, spec_.param("inner_mass", 0.0));
  return std::nullopt;
}

std::optional<double> Profile::declared_mass() const {
  const std::string& k = spec_.kind;
  if (k == "schwarzschild" || k == "shell") return spec_.required("mass");
  if (k == "flat" || k == "thin_well") return 0.0;
  return std::nullopt;
}

std::optional<double> Profile::asymptotic_constant() const {
  const std::string& k = spec_.kind;
  if (k == "schwarzschild" || k == "thin_well") return spec_.offset;
  if (k == "flat") return spec_.param("height", 0.0) + spec_.offset;
  if (k == "shell") {
    const double b = spec_.required("shell_outer"), m = spec_.required("mass");
    return radial_->value(b) - schwarzschild_profile(dim_, m, b) + spec_.offset;
  }
  return std::nullopt;
}

std::shared_ptr<const Profile> Profile::with_offset(double dz) const {
  ProfileSpec s = spec_;
  s.offset += dz;
  return make(dim_, s);
}

std::shared_ptr<const Profile> Profile::with_bumps(const std::vector<Bump>& extra) const {
  ProfileSpec s = spec_;
  s.bumps.insert(s.bumps.end(), extra.begin(), extra.end());
  return make(dim_, s);
}

}  // namespace afg
