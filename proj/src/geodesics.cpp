#include "afg/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>

#include "afg/hypersurface.hpp"
#include "afg/parallel.hpp"

namespace afg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int gcd_all(const Index& o, int n) {
  int g = 0;
  for (int a = 0; a < n; ++a) g = std::gcd(g, std::abs(o[a]));
  return g;
}

// Does the base segment x -> y stay outside the open ball of radius rho?
bool segment_clears_ball(const Vec& x, const Vec& y, int n, double rho) {
  Vec d{};
  for (int a = 0; a < n; ++a) d[a] = y[a] - x[a];
  const double dd = norm2(d, n);
  double t = dd > 0.0 ? -dot(x, d, n) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  Vec p{};
  for (int a = 0; a < n; ++a) p[a] = x[a] + t * d[a];
  return norm2(p, n) >= rho * rho * (1.0 - 1e-12);
}

double lifted_factor(const GraphManifold& g, std::size_t node, const Vec& dir) {
  Differentials dd;
  if (!try_differentials(g, node, DerivativeMode::Auto, &dd)) return 1.0;
  const double s = dot(dd.gradient, dir, g.dim());
  return std::sqrt(1.0 + s * s);
}

double radical_inverse(int base, int index) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------- graph

IntrinsicGraph::IntrinsicGraph(const GraphManifold& g, double region_radius, int stencil_radius)
    : g_(&g), region_radius_(region_radius) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  if (stencil_radius < 1 || stencil_radius > 4) throw ValidationError("stencil radius must be in [1, 4]");
  compact_.assign(d.node_count(), -1);
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    if (!g.active(i)) continue;
    if (norm(d.position(i), n) > region_radius * (1.0 + 1e-12)) continue;
    compact_[i] = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back(i);
  }
  if (nodes_.empty()) throw ValidationError("geodesic region contains no active nodes");
  const int s = stencil_radius;
  Index o{};
  const int span = 2 * s + 1;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= span;
  for (int c = 0; c < total; ++c) {
    int rest = c;
    for (int a = 0; a < n; ++a) {
      o[a] = rest % span - s;
      rest /= span;
    }
    if (gcd_all(o, n) != 1) continue;
    std::ptrdiff_t delta = 0;
    double len2 = 0.0;
    for (int a = 0; a < n; ++a) {
      delta += static_cast<std::ptrdiff_t>(o[a]) * static_cast<std::ptrdiff_t>(d.stride(a));
      len2 += static_cast<double>(o[a]) * o[a];
    }
    offsets_.push_back({o, delta, std::sqrt(len2) * d.spacing});
  }
}

std::vector<double> IntrinsicGraph::distances(const std::vector<std::pair<std::size_t, double>>& sources) const {
  const GraphDomain& d = g_->domain();
  const int n = d.dim;
  const int K = d.half();
  const bool hole = d.has_hole();
  std::vector<double> dist(nodes_.size(), kInf);
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (const auto& [node, d0] : sources) {
    if (node >= compact_.size() || compact_[node] < 0) throw ValidationError("source node outside the geodesic region");
    const std::int64_t c = compact_[node];
    if (d0 < dist[c]) {
      dist[c] = d0;
      queue.push({d0, c});
    }
  }
  const std::vector<double>& f = g_->heights();
  while (!queue.empty()) {
    const auto [du, cu] = queue.top();
    queue.pop();
    if (du > dist[cu]) continue;
    const std::size_t u = nodes_[cu];
    const Index ku = d.index(u);
    const Vec xu = d.position(ku);
    for (const Offset& off : offsets_) {
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        const int k = ku[a] + off.step[a];
        if (k < -K || k > K) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      const std::size_t v = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(u) + off.delta);
      const std::int64_t cv = compact_[v];
      if (cv < 0) continue;
      const double df = f[v] - f[u];
      const double w = std::sqrt(off.base_length * off.base_length + df * df);
      const double cand = du + w;
      if (cand >= dist[cv]) continue;
      if (hole) {
        Vec xv = xu;
        for (int a = 0; a < n; ++a) xv[a] += off.step[a] * d.spacing;
        if (!segment_clears_ball(xu, xv, n, d.hole_radius)) continue;
      }
      dist[cv] = cand;
      queue.push({cand, cv});
    }
  }
  return dist;
}

double IntrinsicGraph::distance(std::size_t p, std::size_t q) const {
  if (q >= compact_.size() || compact_[q] < 0) throw ValidationError("target node outside the geodesic region");
  const double v = distances_from(p)[compact_[q]];
  if (!std::isfinite(v)) throw NumericalError("nodes lie in different components");
  return v;
}

std::size_t IntrinsicGraph::nearest_node(const Vec& x) const {
  const GraphDomain& d = g_->domain();
  std::size_t best = nodes_.front();
  double best_d = kInf;
  for (std::size_t node : nodes_) {
    const Vec y = d.position(node);
    double s = 0.0;
    for (int a = 0; a < d.dim; ++a) s += (y[a] - x[a]) * (y[a] - x[a]);
    if (s < best_d) {
      best_d = s;
      best = node;
    }
  }
  return best;
}

// ---------------------------------------------------------------- depth

DepthResult depth(const GraphManifold& g, double r0, int stencil_radius) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const double h = d.spacing;
  if (!(r0 > 0.0) || r0 > d.outer_radius) throw ValidationError("depth radius must lie inside the grid");
  const IntrinsicGraph ig(g, r0, stencil_radius);
  DepthResult res;
  res.band_width = h;
  std::vector<std::pair<std::size_t, double>> sources;
  for (std::size_t node : ig.nodes()) {
    const Vec x = d.position(node);
    const double rad = norm(x, n);
    if (rad < r0 - h) continue;
    Vec dir{};
    for (int a = 0; a < n; ++a) dir[a] = rad > 0.0 ? x[a] / rad : 0.0;
    sources.push_back({node, (r0 - rad) * lifted_factor(g, node, dir)});
  }
  if (sources.empty()) throw ValidationError("Sigma(r0) has no grid nodes");
  res.sources = sources.size();
  const std::vector<double> dist = ig.distances(sources);
  for (std::size_t c = 0; c < dist.size(); ++c) {
    if (std::isfinite(dist[c]) && dist[c] > res.depth) {
      res.depth = dist[c];
      res.farthest = ig.nodes()[c];
    }
  }
  if (!d.has_hole()) return res;
  // deepest node in the first cell layer around the hole counts as on the boundary
  res.at_hole = norm(d.position(res.farthest), n) <= d.hole_radius + h;

  // Points of the hole boundary: radial projections of hole nodes and of the active
  // nodes around them. Holes thinner than a cell contribute only the latter.
  const double rho = d.hole_radius;
  const int K = d.half();
  auto in_grid = [&](const Index& k) {
    for (int a = 0; a < n; ++a)
      if (k[a] < -K || k[a] > K) return false;
    return true;
  };
  std::vector<Vec> points;
  auto add_projection = [&](const Vec& x) {
    const double r = norm(x, n);
    if (r == 0.0) return;
    Vec p{};
    for (int a = 0; a < n; ++a) p[a] = rho * x[a] / r;
    points.push_back(p);
  };
  const int cube = static_cast<int>(std::pow(3, n));
  for (std::size_t hn = 0; hn < d.node_count(); ++hn) {
    if (g.active(hn)) continue;
    const Index kh = d.index(hn);
    add_projection(d.position(kh));
    for (int c = 0; c < cube; ++c) {
      Index k = kh;
      int rest = c;
      for (int a = 0; a < n; ++a) {
        k[a] += rest % 3 - 1;
        rest /= 3;
      }
      if (in_grid(k) && g.active(d.linear(k))) add_projection(d.position(k));
    }
  }
  const int block = static_cast<int>(std::pow(5, n));
  for (const Vec& p : points) {
    const double fp = g.profile() ? g.profile()->value(p) : [&] {
      double v = 0.0;
      interpolate(d, g.heights(), p, &v);
      return v;
    }();
    Vec pu{};
    for (int a = 0; a < n; ++a) pu[a] = p[a] / rho;
    Index kp{};
    for (int a = 0; a < n; ++a) kp[a] = static_cast<int>(std::lround(p[a] / h));
    double best = kInf;
    std::size_t via = 0;
    for (int c = 0; c < block; ++c) {
      Index k = kp;
      int rest = c;
      for (int a = 0; a < n; ++a) {
        k[a] += rest % 5 - 2;
        rest /= 5;
      }
      if (!in_grid(k)) continue;
      const std::size_t u = d.linear(k);
      if (!ig.in_region(u)) continue;
      const double du = dist[ig.compact(u)];
      if (!std::isfinite(du)) continue;
      const Vec xu = d.position(k);
      Vec diff{};
      for (int a = 0; a < n; ++a) diff[a] = xu[a] - p[a];
      if (dot(diff, pu, n) < 0.0) continue;
      const double df = g.height(u) - fp;
      const double cand = du + std::sqrt(norm2(diff, n) + df * df);
      if (cand < best) {
        best = cand;
        via = u;
      }
    }
    if (std::isfinite(best) && best > res.depth) {
      res.depth = best;
      res.farthest = via;
      res.at_hole = true;
    }
  }
  return res;
}

// ---------------------------------------------------------------- diameter

std::vector<Vec> sphere_directions(int n, int count) {
  if (count < 1) throw ValidationError("need at least one direction");
  std::vector<Vec> dirs;
  const double pi = std::numbers::pi;
  if (n == 2) {
    for (int i = 0; i < count; ++i) dirs.push_back(Vec{std::cos(2 * pi * i / count), std::sin(2 * pi * i / count), 0, 0});
  } else if (n == 3) {
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs.push_back(Vec{s * std::cos(golden * i), s * std::sin(golden * i), z, 0});
    }
  } else if (n == 4) {
    for (int i = 1; i <= count; ++i) {
      const double u1 = radical_inverse(2, i), u2 = radical_inverse(3, i);
      const double u3 = radical_inverse(5, i), u4 = radical_inverse(7, i);
      const double a = std::sqrt(-2.0 * std::log(u1)), b = std::sqrt(-2.0 * std::log(u3));
      Vec v{a * std::cos(2 * pi * u2), a * std::sin(2 * pi * u2), b * std::cos(2 * pi * u4), b * std::sin(2 * pi * u4)};
      const double len = norm(v, 4);
      for (double& c : v) c /= len;
      dirs.push_back(v);
    }
  } else {
    throw ValidationError("direction sampling supports n = 2, 3, 4");
  }
  return dirs;
}

DiameterResult diameter(const GraphManifold& g, double r, bool exact, int stencil_radius) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const IntrinsicGraph ig(g, r, stencil_radius);
  DiameterResult res;
  const ClassParameters& p = g.params();
  res.bound = 2.0 * p.depth + std::numbers::pi * r * std::sqrt(1.0 + p.gamma * p.gamma);
  res.exact = exact || ig.size() <= 1500;

  std::vector<std::size_t> sources;
  if (res.exact) {
    sources = ig.nodes();
  } else {
    for (const Vec& u : sphere_directions(n, 24)) {
      Vec x{};
      for (int a = 0; a < n; ++a) x[a] = r * u[a];
      sources.push_back(ig.nearest_node(x));
    }
    for (const Vec& u : sphere_directions(n, 8)) {
      Vec x{};
      for (int a = 0; a < n; ++a) x[a] = 0.5 * r * u[a];
      sources.push_back(ig.nearest_node(x));
    }
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  }

  std::vector<double> best(sources.size(), 0.0);
  std::vector<std::size_t> arg(sources.size(), 0);
  parallel_chunks(sources.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      const auto dist = ig.distances_from(sources[s]);
      for (std::size_t c = 0; c < dist.size(); ++c) {
        if (std::isfinite(dist[c]) && dist[c] > best[s]) {
          best[s] = dist[c];
          arg[s] = ig.nodes()[c];
        }
      }
    }
  });
  std::size_t far = 0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (best[s] > res.diameter) {
      res.diameter = best[s];
      far = arg[s];
    }
  }
  res.sources = sources.size();
  if (!res.exact) {
    // double sweep from the far end of the best pair
    for (int sweep = 0; sweep < 2; ++sweep) {
      const auto dist = ig.distances_from(far);
      ++res.sources;
      for (std::size_t c = 0; c < dist.size(); ++c) {
        if (std::isfinite(dist[c]) && dist[c] > res.diameter) {
          res.diameter = dist[c];
          far = ig.nodes()[c];
        }
      }
    }
  }
  res.within_bound = res.diameter <= res.bound * (1.0 + 1e-9);
  return res;
}

// ---------------------------------------------------------------- pullback

BoundaryMetric boundary_pullback(const GraphManifold& g, double r, int samples, int stencil_radius, double tol) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const double h = d.spacing;
  if (r + h > d.outer_radius) throw ValidationError("pullback radius too close to the grid boundary");
  if (d.has_hole() && r <= d.hole_radius + h) throw ValidationError("pullback radius inside the hole");
  if (samples < 2) throw ValidationError("pullback needs at least two samples");
  BoundaryMetric bm;
  bm.dim = n;
  bm.radius = r;
  bm.band_width = h;
  const IntrinsicGraph ig(g, r + h, stencil_radius);

  std::vector<std::size_t> band;
  for (std::size_t node : ig.nodes())
    if (std::abs(norm(d.position(node), n) - r) <= h) band.push_back(node);
  if (band.empty()) throw ValidationError("Sigma(r) has no grid nodes");

  const auto dirs = sphere_directions(n, samples);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    Vec x{};
    for (int a = 0; a < n; ++a) x[a] = r * dirs[i][a];
    std::size_t best = band.front();
    double best_d = kInf;
    for (std::size_t node : band) {
      const Vec y = d.position(node);
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += (y[a] - x[a]) * (y[a] - x[a]);
      if (s < best_d) {
        best_d = s;
        best = node;
      }
    }
    if (std::find(bm.nodes.begin(), bm.nodes.end(), best) != bm.nodes.end()) continue;
    bm.nodes.push_back(best);
    bm.labels.push_back(std::to_string(i));
    bm.points.push_back(d.position(best));
  }

  // Flat graph on the same grid, no hole: the reference pullback.
  const GraphDomain flat_domain = GraphDomain::make(n, h, d.outer_radius);
  const GraphManifold flat =
      GraphManifold::from_samples(flat_domain, std::vector<double>(flat_domain.node_count(), 0.0), g.params());
  const IntrinsicGraph ref(flat, r + h, stencil_radius);

  const std::size_t k = bm.nodes.size();
  bm.distance.assign(k * k, 0.0);
  bm.reference.assign(k * k, 0.0);
  bm.chord.assign(k * k, 0.0);
  parallel_chunks(k, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto dm = ig.distances_from(bm.nodes[i]);
      const auto dr = ref.distances_from(bm.nodes[i]);
      for (std::size_t j = 0; j < k; ++j) {
        const double v = dm[ig.compact(bm.nodes[j])];
        if (!std::isfinite(v)) throw NumericalError("boundary samples lie in different components");
        bm.distance[i * k + j] = v;
        bm.reference[i * k + j] = dr[ref.compact(bm.nodes[j])];
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += (bm.points[i][a] - bm.points[j][a]) * (bm.points[i][a] - bm.points[j][a]);
        bm.chord[i * k + j] = std::sqrt(s);
      }
    }
  });
  // symmetrize: both directions are shortest paths, so this only removes rounding asymmetry
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double v = std::min(bm.distance[i * k + j], bm.distance[j * k + i]);
      bm.distance[i * k + j] = bm.distance[j * k + i] = v;
      const double w = std::min(bm.reference[i * k + j], bm.reference[j * k + i]);
      bm.reference[i * k + j] = bm.reference[j * k + i] = w;
    }

  const double gamma = g.params().gamma;
  bm.lipschitz_bound = 2.0 * std::sqrt(1.0 + gamma * gamma);
  bm.min_ratio = kInf;
  bm.max_ratio = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double ratio = bm.distance[i * k + j] / bm.chord[i * k + j];
      if (ratio < bm.min_ratio) {
        bm.min_ratio = ratio;
        bm.worst_low = {i, j};
      }
      if (ratio > bm.max_ratio) {
        bm.max_ratio = ratio;
        bm.worst_high = {i, j};
      }
    }
  bm.within_bounds = bm.min_ratio >= 1.0 - tol && bm.max_ratio <= bm.lipschitz_bound + tol;
  return bm;
}

// ---------------------------------------------------------------- balls

InclusionResult ball_inclusion_check(const GraphManifold& g, std::size_t p, double R, double R_prime,
                                     int stencil_radius) {
  if (!(R < R_prime)) throw ValidationError("ball inclusion needs R < R'");
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const IntrinsicGraph ig(g, d.outer_radius * std::sqrt(static_cast<double>(n)), stencil_radius);
  const auto dist = ig.distances_from(p);
  InclusionResult res;
  const double limit = g.params().r0 + R_prime;
  for (std::size_t c = 0; c < dist.size(); ++c) {
    if (dist[c] > R) continue;
    ++res.nodes;
    const double rad = norm(d.position(ig.nodes()[c]), n);
    res.max_radius = std::max(res.max_radius, rad);
    if (rad > limit) res.included = false;
  }
  return res;
}

BallVolume intrinsic_ball_volume(const GraphManifold& g, std::size_t p, double R, int stencil_radius) {
  if (R < 0.0) throw ValidationError("ball radius must be nonnegative");
  BallVolume res;
  if (R == 0.0) return res;
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const double h = d.spacing;
  const IntrinsicGraph ig(g, d.outer_radius * std::sqrt(static_cast<double>(n)), stencil_radius);
  const auto dist = ig.distances_from(p);
  const double cell = d.cell_volume();
  for (std::size_t c = 0; c < dist.size(); ++c) {
    const double w = std::clamp((R - dist[c]) / h + 0.5, 0.0, 1.0);
    if (w <= 0.0) continue;
    const std::size_t node = ig.nodes()[c];
    const Index k = d.index(node);
    for (int a = 0; a < n; ++a)
      if (std::abs(k[a]) == d.half()) res.escaped = true;
    Differentials dd;
    const double area = try_differentials(g, node, DerivativeMode::Auto, &dd)
                            ? std::sqrt(1.0 + norm2(dd.gradient, n))
                            : 1.0;
    res.volume += w * area * cell;
    ++res.nodes;
  }
  return res;
}

}  // namespace afg
