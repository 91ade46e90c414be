#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "afg/grid.hpp"

namespace afg {

/// Grid nodes lifted to (x, f(x)) with edges along primitive lattice offsets of sup-norm
/// at most `stencil_radius`, weighted by the lifted chord. Edges whose base segment cuts
/// into the hole are dropped. Only active nodes with |x| <= region_radius take part.
class IntrinsicGraph {
 public:
  IntrinsicGraph(const GraphManifold& g, double region_radius, int stencil_radius = 2);

  const GraphManifold& manifold() const { return *g_; }
  double region_radius() const { return region_radius_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t neighbours() const { return offsets_.size(); }
  bool in_region(std::size_t node) const { return compact_[node] >= 0; }
  const std::vector<std::size_t>& nodes() const { return nodes_; }

  /// Multi-source shortest paths; sources carry initial distances. Result is indexed like
  /// nodes(); unreachable entries are +inf.
  std::vector<double> distances(const std::vector<std::pair<std::size_t, double>>& sources) const;
  std::vector<double> distances_from(std::size_t node) const { return distances({{node, 0.0}}); }
  /// Distance between two region nodes. Throws NumericalError if they are disconnected.
  double distance(std::size_t p, std::size_t q) const;

  /// Region node closest to x in the base.
  std::size_t nearest_node(const Vec& x) const;
  /// Position of a compact entry in nodes().
  std::int64_t compact(std::size_t node) const { return compact_[node]; }

 private:
  const GraphManifold* g_;
  double region_radius_;
  std::vector<std::size_t> nodes_;
  std::vector<std::int64_t> compact_;
  struct Offset {
    Index step;
    std::ptrdiff_t delta;
    double base_length;
  };
  std::vector<Offset> offsets_;
};

struct DepthResult {
  double depth = 0.0;
  std::size_t farthest = 0;      // node attaining the depth (or next to the boundary point)
  bool at_hole = false;          // the maximum sits on the hole boundary
  double band_width = 0.0;
  std::size_t sources = 0;
};

/// sup over Omega(r0) of the distance to Sigma(r0) = {|x| = r0}.
DepthResult depth(const GraphManifold& g, double r0, int stencil_radius = 2);

struct DiameterResult {
  double diameter = 0.0;
  double bound = 0.0;  // 2D + pi r sqrt(1 + gamma^2)
  bool within_bound = true;
  std::size_t sources = 0;
  bool exact = false;
};

/// Max intrinsic distance over Omega(r), paths confined to Omega(r). Exact mode runs
/// every node as a source.
DiameterResult diameter(const GraphManifold& g, double r, bool exact = false, int stencil_radius = 2);

/// Direction samples on S^(n-1): Fibonacci lattice for n = 3, Gaussianized Halton for n = 4.
std::vector<Vec> sphere_directions(int n, int count);

struct BoundaryMetric {
  int dim = 3;
  double radius = 0.0;
  double band_width = 0.0;
  std::vector<std::string> labels;  // index of the direction sample
  std::vector<std::size_t> nodes;
  std::vector<Vec> points;           // projected node positions
  std::vector<double> distance;      // row-major, pullback distances on the member
  std::vector<double> reference;     // same pairs on the flat graph over the same grid
  std::vector<double> chord;         // |x - y| in the base
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double lipschitz_bound = 0.0;      // 2 sqrt(1 + gamma^2)
  std::pair<std::size_t, std::size_t> worst_low{0, 0}, worst_high{0, 0};
  bool within_bounds = true;
  std::size_t size() const { return nodes.size(); }
  double at(std::size_t i, std::size_t j) const { return distance[i * nodes.size() + j]; }
};

/// Lifts direction samples to Sigma(r) and fills the pullback distance matrix.
BoundaryMetric boundary_pullback(const GraphManifold& g, double r, int samples, int stencil_radius = 2,
                                 double tol = 1e-3);

struct InclusionResult {
  bool included = true;
  double max_radius = 0.0;  // largest |x| reached by the ball
  std::size_t nodes = 0;
};

/// Every node within intrinsic distance R of p projects into B(r0 + R').
InclusionResult ball_inclusion_check(const GraphManifold& g, std::size_t p, double R, double R_prime,
                                     int stencil_radius = 2);

struct BallVolume {
  double volume = 0.0;
  bool escaped = false;  // ball reaches the edge of the grid: value is a lower bound
  std::size_t nodes = 0;
};

/// Induced volume of {q : d(p, q) <= R} with a one-cell smooth indicator.
BallVolume intrinsic_ball_volume(const GraphManifold& g, std::size_t p, double R, int stencil_radius = 3);

}  // namespace afg
