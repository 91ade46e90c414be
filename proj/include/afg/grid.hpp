#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "afg/core.hpp"
#include "afg/profile.hpp"

namespace afg {

/// Regular grid on [-r_max, r_max]^n with spacing h. Nodes sit at k*h with |k_i| <= K.
/// Nodes strictly inside the optional hole ball are kept in storage but are inactive.
struct GraphDomain {
  int dim = 3;
  double spacing = 0.1;
  double outer_radius = 1.0;
  double hole_radius = 0.0;  // 0 means no hole

  static GraphDomain make(int dim, double spacing, double outer_radius, double hole_radius = 0.0);

  int half() const { return half_; }
  int side() const { return 2 * half_ + 1; }
  std::size_t node_count() const { return count_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  Index index(std::size_t node) const;
  std::size_t linear(const Index& k) const;
  bool contains(const Index& k) const;
  Vec position(const Index& k) const;
  Vec position(std::size_t node) const { return position(index(node)); }
  bool has_hole() const { return hole_radius > 0.0; }
  bool in_hole(const Vec& x) const { return has_hole() && norm(x, dim) < hole_radius; }
  bool in_hole(std::size_t node) const { return in_hole(position(node)); }
  double cell_volume() const { return std::pow(spacing, dim); }

 private:
  int half_ = 0;
  std::size_t count_ = 0;
  std::array<std::size_t, kMaxDim> strides_{};
};

/// Parameters of the class of graphs: r0, gamma, depth bound D, decay alpha < 0,
/// and the asymptotic constant Lambda.
struct ClassParameters {
  double r0 = 1.0;
  double gamma = 1.0;
  double depth = 1.0;
  double alpha = -0.5;
  double lambda = 0.0;
};

class GraphManifold {
 public:
  /// Samples an analytic profile. Inactive hole nodes get the profile value at the
  /// radial projection onto the hole boundary.
  static GraphManifold from_profile(const GraphDomain& domain, std::shared_ptr<const Profile> profile,
                                    const ClassParameters& params);
  static GraphManifold from_samples(const GraphDomain& domain, std::vector<double> heights,
                                    const ClassParameters& params);

  const GraphDomain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  const std::vector<double>& heights() const { return heights_; }
  double height(std::size_t node) const { return heights_[node]; }
  bool active(std::size_t node) const { return active_[node] != 0; }
  const Profile* profile() const { return profile_.get(); }
  std::shared_ptr<const Profile> profile_ptr() const { return profile_; }
  const ClassParameters& params() const { return params_; }
  void set_params(const ClassParameters& p) { params_ = p; }

  /// f + dz, keeping the analytic descriptor in sync.
  GraphManifold shifted(double dz) const;
  /// Same surface on another grid. Needs an analytic profile.
  GraphManifold resampled(const GraphDomain& domain) const;

  /// Height at an arbitrary point: analytic when possible, else multilinear interpolation.
  double value_at(const Vec& x) const;

 private:
  GraphDomain domain_;
  std::vector<double> heights_;
  std::vector<unsigned char> active_;
  std::shared_ptr<const Profile> profile_;
  ClassParameters params_;
};

/// Multilinear interpolation of per-node data at x. Returns false if x leaves the grid.
bool interpolate(const GraphDomain& domain, const std::vector<double>& data, const Vec& x, double* out);

}  // namespace afg
