#include "afg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "afg/parallel.hpp"

namespace afg {

GraphDomain GraphDomain::make(int dim, double spacing, double outer_radius, double hole_radius) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("grid dimension must be in [1, 4]");
  if (!(spacing > 0.0)) throw ValidationError("grid spacing must be positive");
  if (!(outer_radius >= spacing)) throw ValidationError("outer radius must be at least one grid spacing");
  if (hole_radius < 0.0 || hole_radius >= outer_radius) throw ValidationError("hole radius must lie in [0, r_max)");
  GraphDomain d;
  d.dim = dim;
  d.spacing = spacing;
  d.outer_radius = outer_radius;
  d.hole_radius = hole_radius;
  d.half_ = static_cast<int>(std::floor(outer_radius / spacing + 1e-9));
  const std::size_t side = static_cast<std::size_t>(d.side());
  std::size_t count = 1;
  for (int a = dim - 1; a >= 0; --a) {
    d.strides_[a] = count;
    count *= side;
  }
  if (count > 200'000'000) throw ValidationError("grid too large (more than 2e8 nodes)");
  d.count_ = count;
  return d;
}

Index GraphDomain::index(std::size_t node) const {
  Index k{};
  for (int a = 0; a < dim; ++a) {
    k[a] = static_cast<int>(node / strides_[a]) - half_;
    node %= strides_[a];
  }
  return k;
}

std::size_t GraphDomain::linear(const Index& k) const {
  std::size_t node = 0;
  for (int a = 0; a < dim; ++a) node += static_cast<std::size_t>(k[a] + half_) * strides_[a];
  return node;
}

bool GraphDomain::contains(const Index& k) const {
  for (int a = 0; a < dim; ++a)
    if (k[a] < -half_ || k[a] > half_) return false;
  return true;
}

Vec GraphDomain::position(const Index& k) const {
  Vec x{};
  for (int a = 0; a < dim; ++a) x[a] = k[a] * spacing;
  return x;
}

GraphManifold GraphManifold::from_profile(const GraphDomain& domain, std::shared_ptr<const Profile> profile,
                                          const ClassParameters& params) {
  if (!profile) throw ValidationError("null profile");
  if (profile->dim() != domain.dim) throw ValidationError("profile and grid dimensions differ");
  GraphManifold g;
  g.domain_ = domain;
  g.profile_ = std::move(profile);
  g.params_ = params;
  g.heights_.resize(domain.node_count());
  g.active_.resize(domain.node_count());
  const int n = domain.dim;
  parallel_chunks(domain.node_count(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Vec x = domain.position(i);
      const bool hole = domain.in_hole(x);
      g.active_[i] = hole ? 0 : 1;
      if (hole) {
        const double r = norm(x, n);
        Vec y{};
        if (r > 0.0) {
          for (int a = 0; a < n; ++a) y[a] = x[a] * domain.hole_radius / r;
        } else {
          y[0] = domain.hole_radius;
        }
        x = y;
      }
      g.heights_[i] = g.profile_->value(x);
    }
  });
  return g;
}

GraphManifold GraphManifold::from_samples(const GraphDomain& domain, std::vector<double> heights,
                                          const ClassParameters& params) {
  if (heights.size() != domain.node_count())
    throw ValidationError("height array has " + std::to_string(heights.size()) + " entries, grid has " +
                          std::to_string(domain.node_count()));
  GraphManifold g;
  g.domain_ = domain;
  g.heights_ = std::move(heights);
  g.params_ = params;
  g.active_.resize(domain.node_count());
  for (std::size_t i = 0; i < domain.node_count(); ++i) {
    if (!std::isfinite(g.heights_[i])) throw ValidationError("non-finite height at node " + std::to_string(i));
    g.active_[i] = domain.in_hole(i) ? 0 : 1;
  }
  return g;
}

GraphManifold GraphManifold::shifted(double dz) const {
  GraphManifold g = *this;
  for (double& v : g.heights_) v += dz;
  if (profile_) g.profile_ = profile_->with_offset(dz);
  g.params_.lambda += dz;
  return g;
}

GraphManifold GraphManifold::resampled(const GraphDomain& domain) const {
  if (!profile_) throw ValidationError("resampling needs an analytic profile");
  return from_profile(domain, profile_, params_);
}

bool interpolate(const GraphDomain& domain, const std::vector<double>& data, const Vec& x, double* out) {
  const int n = domain.dim;
  const int K = domain.half();
  Index base{};
  Vec frac{};
  for (int a = 0; a < n; ++a) {
    const double u = x[a] / domain.spacing;
    if (u < -K - 1e-9 || u > K + 1e-9) return false;
    int k = static_cast<int>(std::floor(u));
    k = std::clamp(k, -K, K - 1);
    base[a] = k;
    frac[a] = u - k;
  }
  double total = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    Index k = base;
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      if (corner & (1 << a)) {
        k[a] += 1;
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w != 0.0) total += w * data[domain.linear(k)];
  }
  *out = total;
  return true;
}

double GraphManifold::value_at(const Vec& x) const {
  if (profile_) return profile_->value(x);
  double v = 0.0;
  if (!interpolate(domain_, heights_, x, &v)) throw ValidationError("point outside the sampled grid");
  return v;
}

}  // namespace afg
