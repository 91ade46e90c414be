#pragma once

#include <algorithm>
#include <boost/rational.hpp>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "afg/core.hpp"

namespace afg {

using Rational = boost::rational<long long>;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) {
  return static_cast<double>(v.numerator()) / static_cast<double>(v.denominator());
}

inline std::string format_scalar(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
inline std::string format_scalar(const Rational& v) {
  std::ostringstream s;
  s << v.numerator();
  if (v.denominator() != 1) s << '/' << v.denominator();
  return s.str();
}

template <typename S>
S abs_value(const S& v) {
  return v < S(0) ? -v : v;
}

/// Outcome of an axiom scan; i, j, k name the offending points.
struct MetricCheck {
  bool ok = true;
  std::string reason;
  std::size_t i = 0, j = 0, k = 0;
};

/// Scans zero diagonal, symmetry, nonnegativity, positivity off the diagonal and every
/// triangle d(i,k) <= d(i,j) + d(j,k) + tol.
template <typename S>
MetricCheck check_metric(std::size_t n, const std::vector<S>& d, S tol = S(0)) {
  MetricCheck c;
  auto fail = [&](std::string why, std::size_t i, std::size_t j, std::size_t k) {
    c.ok = false;
    c.reason = std::move(why);
    c.i = i;
    c.j = j;
    c.k = k;
    return c;
  };
  if (d.size() != n * n) return fail("matrix is not square", 0, 0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i * n + i] != S(0)) return fail("nonzero diagonal", i, i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (d[i * n + j] != d[j * n + i]) return fail("asymmetric entry", i, j, j);
      if (d[i * n + j] < S(0)) return fail("negative distance", i, j, j);
      if (i != j && d[i * n + j] == S(0)) return fail("distinct points at distance zero", i, j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (d[i * n + k] > d[i * n + j] + d[j * n + k] + tol) return fail("triangle inequality violated", i, j, k);
  return c;
}

template <typename S>
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  /// Validates every axiom; throws ValidationError naming the offending triple.
  static FiniteMetricSpace validate(std::vector<std::string> labels, std::vector<S> matrix, S tol = S(0)) {
    const std::size_t n = labels.size();
    const MetricCheck c = check_metric(n, matrix, tol);
    if (!c.ok) {
      std::ostringstream msg;
      msg << c.reason << " at (" << c.i << ", " << c.j << ", " << c.k << ")";
      throw ValidationError(msg.str());
    }
    FiniteMetricSpace m;
    m.labels_ = std::move(labels);
    m.d_ = std::move(matrix);
    return m;
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<S>& matrix() const { return d_; }
  const S& operator()(std::size_t i, std::size_t j) const { return d_[i * size() + j]; }

  S diameter() const {
    S best(0);
    for (const S& v : d_) best = std::max(best, v);
    return best;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<S> d_;
};

template <typename S>
void require_same_labels(const FiniteMetricSpace<S>& a, const FiniteMetricSpace<S>& b) {
  if (a.labels() != b.labels()) throw ValidationError("metric spaces have different label sets");
}

/// sup over pairs of |d_a - d_b|.
template <typename S>
S uniform_distance(const FiniteMetricSpace<S>& a, const FiniteMetricSpace<S>& b) {
  require_same_labels(a, b);
  S best(0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) best = std::max(best, abs_value(S(a(i, j) - b(i, j))));
  return best;
}

/// Smallest lambda >= 1 with lambda >= d_j / d_0 >= 1 / lambda on every pair.
template <typename S>
S ratio_bound(const FiniteMetricSpace<S>& d0, const FiniteMetricSpace<S>& dj) {
  require_same_labels(d0, dj);
  S best(1);
  for (std::size_t i = 0; i < d0.size(); ++i)
    for (std::size_t j = i + 1; j < d0.size(); ++j) {
      if (d0(i, j) == S(0)) throw ValidationError("reference metric has a zero off-diagonal entry");
      const S r = dj(i, j) / d0(i, j);
      best = std::max(best, std::max(r, S(1) / r));
    }
  return best;
}

/// Product [-eps, eps] x X with the five-case distance. Points are indexed
/// z = level * |X| + p, levels running from -eps to +eps.
template <typename S>
class GluedSpace {
 public:
  GluedSpace(FiniteMetricSpace<S> a, FiniteMetricSpace<S> b, S eps, std::vector<S> levels)
      : a_(std::move(a)), b_(std::move(b)), eps_(eps), levels_(std::move(levels)) {
    const std::size_t n = a_.size();
    inf_ab_.assign(n * n, S(0));
    inf_ba_.assign(n * n, S(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        S ab = a_(i, 0) + b_(0, j), ba = b_(i, 0) + a_(0, j);
        for (std::size_t p = 1; p < n; ++p) {
          ab = std::min(ab, S(a_(i, p) + b_(p, j)));
          ba = std::min(ba, S(b_(i, p) + a_(p, j)));
        }
        inf_ab_[i * n + j] = ab;
        inf_ba_[i * n + j] = ba;
      }
  }

  const FiniteMetricSpace<S>& bottom_metric() const { return a_; }
  const FiniteMetricSpace<S>& top_metric() const { return b_; }
  const S& epsilon() const { return eps_; }
  const std::vector<S>& levels() const { return levels_; }
  std::size_t base_size() const { return a_.size(); }
  std::size_t size() const { return levels_.size() * a_.size(); }
  std::size_t level_of(std::size_t z) const { return z / a_.size(); }
  std::size_t point_of(std::size_t z) const { return z % a_.size(); }
  std::size_t index(std::size_t level, std::size_t p) const { return level * a_.size() + p; }
  const S& t(std::size_t z) const { return levels_[level_of(z)]; }

  /// Indices of one t-slice; slice 0 is t = -eps, the last is t = +eps.
  std::vector<std::size_t> slice(std::size_t level) const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < a_.size(); ++p) out.push_back(index(level, p));
    return out;
  }
  std::vector<std::size_t> bottom() const { return slice(0); }
  std::vector<std::size_t> top() const { return slice(levels_.size() - 1); }

  S case_d(std::size_t z1, std::size_t z2) const {
    const std::size_t p1 = point_of(z1), p2 = point_of(z2);
    return abs_value(S(t(z1) - t(z2))) + std::max(a_(p1, p2), b_(p1, p2));
  }
  S case_minus(std::size_t z1, std::size_t z2) const {
    return abs_value(S(t(z1) + eps_)) + abs_value(S(t(z2) + eps_)) + a_(point_of(z1), point_of(z2));
  }
  S case_plus(std::size_t z1, std::size_t z2) const {
    return abs_value(S(t(z1) - eps_)) + abs_value(S(t(z2) - eps_)) + b_(point_of(z1), point_of(z2));
  }
  S case_minus_plus(std::size_t z1, std::size_t z2) const {
    return abs_value(S(t(z1) + eps_)) + abs_value(S(t(z2) - eps_)) + S(2) * eps_ +
           inf_ab_[point_of(z1) * base_size() + point_of(z2)];
  }
  S case_plus_minus(std::size_t z1, std::size_t z2) const {
    return abs_value(S(t(z1) - eps_)) + abs_value(S(t(z2) + eps_)) + S(2) * eps_ +
           inf_ba_[point_of(z1) * base_size() + point_of(z2)];
  }

  S distance(std::size_t z1, std::size_t z2) const {
    if (z1 == z2) return S(0);
    return std::min({case_d(z1, z2), case_minus(z1, z2), case_plus(z1, z2), case_minus_plus(z1, z2),
                     case_plus_minus(z1, z2)});
  }

  std::vector<S> matrix() const {
    const std::size_t n = size();
    std::vector<S> m(n * n, S(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = distance(i, j);
    return m;
  }

 private:
  FiniteMetricSpace<S> a_, b_;
  S eps_;
  std::vector<S> levels_;
  std::vector<S> inf_ab_, inf_ba_;
};

/// Glues (X, d_a) and (X, d_b) along [-eps, eps] with t_count evenly spaced levels.
/// eps defaults to sup |d_a - d_b|; an override must not be smaller. eps = 0 yields one slice.
template <typename S>
GluedSpace<S> glue(const FiniteMetricSpace<S>& a, const FiniteMetricSpace<S>& b, int t_count,
                   std::optional<S> eps_override = std::nullopt) {
  require_same_labels(a, b);
  if (t_count < 2) throw ValidationError("gluing needs at least two t-levels");
  const S sup = uniform_distance(a, b);
  S eps = sup;
  if (eps_override) {
    if (*eps_override < sup) throw ValidationError("epsilon override is below sup |d_a - d_b|");
    eps = *eps_override;
  }
  std::vector<S> levels;
  if (eps == S(0)) {
    levels.push_back(S(0));
  } else {
    for (int k = 0; k < t_count; ++k) levels.push_back(-eps + S(2) * eps * S(k) / S(t_count - 1));
    levels.front() = -eps;
    levels.back() = eps;
  }
  return GluedSpace<S>(a, b, eps, std::move(levels));
}

/// Hausdorff distance between index sets of Z under the glued metric.
template <typename S>
S hausdorff_distance(const GluedSpace<S>& z, const std::vector<std::size_t>& A, const std::vector<std::size_t>& B) {
  if (A.empty() || B.empty()) throw ValidationError("Hausdorff distance of an empty set");
  auto directed = [&](const std::vector<std::size_t>& X, const std::vector<std::size_t>& Y) {
    S worst(0);
    for (std::size_t x : X) {
      S best = z.distance(x, Y.front());
      for (std::size_t y : Y) best = std::min(best, z.distance(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

/// 2^((n+1)/2) lambda^(n+1) 2 eps M, kept as rational_part * sqrt(2)^[sqrt2].
template <typename S>
struct FlatBound {
  S rational_part;
  bool sqrt2 = false;
  double value() const { return to_double(rational_part) * (sqrt2 ? std::sqrt(2.0) : 1.0); }
};

template <typename S>
S power(S base, int e) {
  S r(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

template <typename S>
FlatBound<S> flat_bound(int n, const S& lambda, const S& eps, const S& mass) {
  if (n < 1) throw ValidationError("flat bound needs n >= 1");
  if (lambda < S(0) || eps < S(0) || mass < S(0)) throw ValidationError("flat bound inputs must be nonnegative");
  FlatBound<S> f;
  f.rational_part = power(S(2), (n + 1) / 2) * power(lambda, n + 1) * S(2) * eps * mass;
  f.sqrt2 = (n + 1) % 2 == 1;
  return f;
}

/// Mass 2 eps M of the product filling [-eps, eps] x T.
template <typename S>
S product_filling_mass(const S& eps, const S& mass) {
  if (eps < S(0) || mass < S(0)) throw ValidationError("filling mass inputs must be nonnegative");
  return S(2) * eps * mass;
}

/// Mass of an n-current after scaling the metric by lambda.
template <typename S>
S mass_rescale(const S& mass, const S& lambda, int n) {
  if (!(lambda > S(0))) throw ValidationError("rescaling factor must be positive");
  if (n < 0) throw ValidationError("current dimension must be nonnegative");
  return power(lambda, n) * mass;
}

// ----------------------------------------------------------------
// The swap example: both metrics complete, the glued space is not.
// ----------------------------------------------------------------

struct NoncompleteReport {
  int k = 0;
  Rational eps_truncated;  // sup |d_a - d_b| over the truncated set, by enumeration
  Rational eps_used;       // 1, the sup over the full set
  std::size_t mid_pairs_checked = 0;
  bool mid_slice_exact = true;          // d'(z_i, z_m) = |2^-i - 2^-m|
  Rational min_cross_bound;             // min over z_i, z of d_-, d_+, d_-+, d_+-
  bool cross_bounds_hold = true;        // all of them >= 1
  Rational limit_margin;                // min over candidate limits of d'(z_k, z)
  Rational min_positive_gap;            // 2^-k
  bool limit_excluded = true;
  std::vector<Rational> tail_distances; // d'(z_i, z_{i+1}) along the sequence
};

struct NoncompleteFixture {
  FiniteMetricSpace<Rational> a, b;
  GluedSpace<Rational> glued;
  NoncompleteReport report;
};

/// X_k = {0, 2^-k, ..., 1/2, 1}; d_a = |p - q|, d_b = |F(p) - F(q)| with F swapping 0 and 1.
NoncompleteFixture noncomplete_fixture(int k, int t_count = 5);

}  // namespace afg
