#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace afg {

/// Largest base dimension n supported by the grid code (graphs in E^{n+1}).
inline constexpr int kMaxDim = 4;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<double, kMaxDim * kMaxDim>;
using Index = std::array<int, kMaxDim>;

// ================================================================
// Error hierarchy. The CLI maps these onto exit codes 1, 2 and 3.
// ================================================================

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters, violated preconditions, failed class membership.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a trustworthy number.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// First and second derivatives of a height function at one point.
struct Differentials {
  Vec gradient{};
  Mat hessian{};

  double& h(int i, int j) { return hessian[i * kMaxDim + j]; }
  double h(int i, int j) const { return hessian[i * kMaxDim + j]; }
};

inline double dot(const Vec& a, const Vec& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a, int n) { return dot(a, a, n); }
inline double norm(const Vec& a, int n) { return std::sqrt(norm2(a, n)); }

/// (n-1)-volume of the unit sphere in R^n, written omega_{n-1} in the mass formulas.
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// n-volume of the unit ball in R^n.
inline double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

inline double ball_volume(int n, double r) { return unit_ball_volume(n) * std::pow(r, n); }
inline double sphere_area(int n, double r) { return unit_sphere_area(n) * std::pow(r, n - 1); }

}  // namespace afg
