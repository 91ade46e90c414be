#include "afg/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "afg/parallel.hpp"

namespace afg {

namespace {

using Opt = std::optional<double>;

bool usable(const GraphManifold& g, const Index& k) {
  const GraphDomain& d = g.domain();
  return d.contains(k) && g.active(d.linear(k));
}

template <typename F>
Opt deriv1(const GraphDomain& d, const Index& k, int a, F&& val) {
  const double h = d.spacing;
  Index p = k, m = k;
  ++p[a];
  --m[a];
  const Opt fp = val(p), fm = val(m);
  if (fp && fm) return (*fp - *fm) / (2.0 * h);
  const Opt f0 = val(k);
  if (!f0) return std::nullopt;
  if (fp) {
    Index p2 = k;
    p2[a] += 2;
    if (const Opt f2 = val(p2)) return (-3.0 * *f0 + 4.0 * *fp - *f2) / (2.0 * h);
  }
  if (fm) {
    Index m2 = k;
    m2[a] -= 2;
    if (const Opt f2 = val(m2)) return (3.0 * *f0 - 4.0 * *fm + *f2) / (2.0 * h);
  }
  return std::nullopt;
}

template <typename F>
Opt deriv2(const GraphDomain& d, const Index& k, int a, F&& val) {
  const double h2 = d.spacing * d.spacing;
  const Opt f0 = val(k);
  if (!f0) return std::nullopt;
  Index p = k, m = k;
  ++p[a];
  --m[a];
  const Opt fp = val(p), fm = val(m);
  if (fp && fm) return (*fp - 2.0 * *f0 + *fm) / h2;
  for (int dir : {1, -1}) {
    Index q1 = k, q2 = k, q3 = k;
    q1[a] += dir;
    q2[a] += 2 * dir;
    q3[a] += 3 * dir;
    const Opt f1 = val(q1), f2 = val(q2), f3 = val(q3);
    if (f1 && f2 && f3) return (2.0 * *f0 - 5.0 * *f1 + 4.0 * *f2 - *f3) / h2;
  }
  return std::nullopt;
}

bool fd_general(const GraphManifold& g, const Index& k, Differentials* out) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  auto height = [&](const Index& q) -> Opt {
    if (!usable(g, q)) return std::nullopt;
    return g.height(d.linear(q));
  };
  Differentials r;
  for (int a = 0; a < n; ++a) {
    const Opt fa = deriv1(d, k, a, height);
    const Opt faa = deriv2(d, k, a, height);
    if (!fa || !faa) return false;
    r.gradient[a] = *fa;
    r.h(a, a) = *faa;
    for (int b = 0; b < a; ++b) {
      auto inner = [&](const Index& q) -> Opt { return deriv1(d, q, b, height); };
      const Opt fab = deriv1(d, k, a, inner);
      if (!fab) return false;
      r.h(a, b) = r.h(b, a) = *fab;
    }
  }
  *out = r;
  return true;
}

// Central stencils straight off the strides, valid when every node within two steps is usable.
bool fd_interior(const GraphManifold& g, std::size_t node, const Index& k, Differentials* out) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const int K = d.half();
  for (int a = 0; a < n; ++a)
    if (k[a] < -K + 2 || k[a] > K - 2) return false;
  if (d.has_hole()) {
    const double r = norm(d.position(k), n);
    if (r < d.hole_radius + 2.0 * std::sqrt(static_cast<double>(n)) * d.spacing + 1e-12) return false;
  }
  const double* f = g.heights().data() + node;
  const double h = d.spacing;
  const double inv2h = 0.5 / h, invh2 = 1.0 / (h * h), inv4h2 = 0.25 / (h * h);
  for (int a = 0; a < n; ++a) {
    const std::ptrdiff_t sa = static_cast<std::ptrdiff_t>(d.stride(a));
    out->gradient[a] = (f[sa] - f[-sa]) * inv2h;
    out->h(a, a) = (f[sa] - 2.0 * f[0] + f[-sa]) * invh2;
    for (int b = 0; b < a; ++b) {
      const std::ptrdiff_t sb = static_cast<std::ptrdiff_t>(d.stride(b));
      const double v = (f[sa + sb] - f[sa - sb] - f[-sa + sb] + f[-sa - sb]) * inv4h2;
      out->h(a, b) = out->h(b, a) = v;
    }
  }
  return true;
}

std::vector<std::array<int, kMaxDim>> permutations(int n) {
  std::array<int, kMaxDim> p{};
  std::iota(p.begin(), p.begin() + n, 0);
  std::vector<std::array<int, kMaxDim>> all;
  do {
    all.push_back(p);
  } while (std::next_permutation(p.begin(), p.begin() + n));
  return all;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Volume of the (m)-simplex spanned by m edge vectors in R^n.
double simplex_volume(const std::array<Vec, kMaxDim>& edges, int m, int n) {
  double gram[kMaxDim][kMaxDim];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) gram[i][j] = dot(edges[i], edges[j], n);
  double det = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(gram[r][c]) > std::abs(gram[piv][c])) piv = r;
    if (gram[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < m; ++j) std::swap(gram[c][j], gram[piv][j]);
      det = -det;
    }
    det *= gram[c][c];
    for (int r = c + 1; r < m; ++r) {
      const double factor = gram[r][c] / gram[c][c];
      for (int j = c; j < m; ++j) gram[r][j] -= factor * gram[c][j];
    }
  }
  return std::sqrt(std::max(0.0, det)) / factorial(m);
}

Index cell_base(const GraphDomain& d, std::size_t cell) {
  const int cells_per_side = 2 * d.half();
  Index k{};
  for (int a = d.dim - 1; a >= 0; --a) {
    k[a] = static_cast<int>(cell % cells_per_side) - d.half();
    cell /= cells_per_side;
  }
  return k;
}

std::size_t cell_count(const GraphDomain& d) {
  std::size_t c = 1;
  for (int a = 0; a < d.dim; ++a) c *= static_cast<std::size_t>(2 * d.half());
  return c;
}

struct CellCorners {
  int count = 0;
  std::array<std::size_t, 16> node{};
  std::array<double, 16> value{};
  bool all_active = true;
  bool on_boundary = false;
};

CellCorners corners(const GraphManifold& g, const Index& base) {
  const GraphDomain& d = g.domain();
  CellCorners c;
  c.count = 1 << d.dim;
  const std::size_t root = d.linear(base);
  for (int m = 0; m < c.count; ++m) {
    std::size_t node = root;
    for (int a = 0; a < d.dim; ++a)
      if (m & (1 << a)) node += d.stride(a);
    c.node[m] = node;
    c.value[m] = g.height(node);
    if (!g.active(node)) c.all_active = false;
  }
  for (int a = 0; a < d.dim; ++a)
    if (base[a] == -d.half() || base[a] + 1 == d.half()) c.on_boundary = true;
  return c;
}

double mean_curvature(const Differentials& dd, int n, double* grad_norm) {
  double g2 = norm2(dd.gradient, n);
  double lap = 0.0, quad = 0.0;
  for (int i = 0; i < n; ++i) {
    lap += dd.h(i, i);
    for (int j = 0; j < n; ++j) quad += dd.gradient[i] * dd.gradient[j] * dd.h(i, j);
  }
  *grad_norm = std::sqrt(g2);
  if (g2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (lap - quad / g2) / std::sqrt(g2);
}

struct LevelAccumulator {
  double area = 0.0, clipped = 0.0, hint = 0.0, weighted = 0.0;
  double min_grad = std::numeric_limits<double>::infinity();
  double min_h = std::numeric_limits<double>::infinity();
  double max_h = -std::numeric_limits<double>::infinity();
  std::size_t facets = 0, skipped = 0;
  bool boundary = false, hole = false;

  void merge(const LevelAccumulator& o) {
    area += o.area;
    clipped += o.clipped;
    hint += o.hint;
    weighted += o.weighted;
    min_grad = std::min(min_grad, o.min_grad);
    min_h = std::min(min_h, o.min_h);
    max_h = std::max(max_h, o.max_h);
    facets += o.facets;
    skipped += o.skipped;
    boundary = boundary || o.boundary;
    hole = hole || o.hole;
  }
};

}  // namespace

// ---------------------------------------------------------------- derivatives

bool try_differentials(const GraphManifold& g, std::size_t node, DerivativeMode mode, Differentials* out) {
  if (!g.active(node)) return false;
  const GraphDomain& d = g.domain();
  const bool analytic = mode == DerivativeMode::Analytic || (mode == DerivativeMode::Auto && g.profile());
  if (analytic) {
    if (!g.profile()) return false;
    *out = g.profile()->differentials(d.position(node));
    return true;
  }
  const Index k = d.index(node);
  if (fd_interior(g, node, k, out)) return true;
  return fd_general(g, k, out);
}

Differentials differentials(const GraphManifold& g, std::size_t node, DerivativeMode mode) {
  if (node >= g.domain().node_count()) throw ValidationError("node index outside the grid");
  if (!g.active(node)) throw ValidationError("node lies inside the excised hole");
  if (mode == DerivativeMode::Analytic && !g.profile())
    throw ValidationError("analytic derivatives requested but the manifold has no profile");
  Differentials d;
  if (!try_differentials(g, node, mode, &d)) throw NumericalError("no finite-difference stencil fits at this node");
  return d;
}

Vec reilly_vector(const Differentials& d, int n) {
  const double denom = 1.0 + norm2(d.gradient, n);
  double lap = 0.0;
  for (int i = 0; i < n; ++i) lap += d.h(i, i);
  Vec v{};
  for (int j = 0; j < n; ++j) {
    double hg = 0.0;
    for (int i = 0; i < n; ++i) hg += d.h(i, j) * d.gradient[i];
    v[j] = (lap * d.gradient[j] - hg) / denom;
  }
  return v;
}

double scalar_curvature(const GraphManifold& g, std::size_t node, DerivativeMode mode) {
  const GraphDomain& d = g.domain();
  if (node >= d.node_count() || !g.active(node)) throw ValidationError("node outside the active domain");
  const Index k = d.index(node);
  const int n = d.dim;
  double r = 0.0;
  for (int j = 0; j < n; ++j) {
    double vj[2];
    for (int s = 0; s < 2; ++s) {
      Index q = k;
      q[j] += s == 0 ? 1 : -1;
      Differentials dd;
      if (!d.contains(q) || !try_differentials(g, d.linear(q), mode, &dd))
        throw NumericalError("scalar curvature needs a neighbour stencil that is not available");
      vj[s] = reilly_vector(dd, n)[j];
    }
    r += (vj[0] - vj[1]) / (2.0 * d.spacing);
  }
  return r;
}

CurvatureField scalar_curvature_field(const GraphManifold& g, DerivativeMode mode, double r_min, double r_max) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  const std::size_t count = d.node_count();
  const double hi = r_max < 0.0 ? std::numeric_limits<double>::infinity() : r_max;
  const double pad = 1.5 * d.spacing;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> v(count * n, kNaN);
  parallel_chunks(count, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double rad = norm(d.position(i), n);
      if (rad < r_min - pad || rad > hi + pad) continue;
      Differentials dd;
      if (!try_differentials(g, i, mode, &dd)) continue;
      const Vec vi = reilly_vector(dd, n);
      for (int j = 0; j < n; ++j) v[i * n + j] = vi[j];
    }
  });

  CurvatureField field;
  field.values.assign(count, kNaN);
  std::vector<unsigned char> excluded(count, 0);
  parallel_chunks(count, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      if (!g.active(i)) continue;
      const Vec x = d.position(i);
      const double rad = norm(x, n);
      if (rad < r_min || rad > hi) continue;
      const Index k = d.index(i);
      double r = 0.0;
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) {
        if (k[j] <= -d.half() || k[j] >= d.half()) {
          ok = false;
          break;
        }
        const double vp = v[(i + d.stride(j)) * n + j];
        const double vm = v[(i - d.stride(j)) * n + j];
        if (std::isnan(vp) || std::isnan(vm)) ok = false;
        r += (vp - vm) / (2.0 * d.spacing);
      }
      if (ok) {
        field.values[i] = r;
      } else {
        excluded[i] = 1;
      }
    }
  });

  double outer = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec x = d.position(i);
    if (excluded[i]) {
      ++field.excluded;
      const Index k = d.index(i);
      bool at_box = false;
      for (int a = 0; a < n; ++a)
        if (std::abs(k[a]) >= d.half() - 1) at_box = true;
      if (!at_box && d.has_hole()) field.hole_collar = std::max(field.hole_collar, norm(x, n) - d.hole_radius);
    } else if (!std::isnan(field.values[i])) {
      ++field.evaluated;
      for (int a = 0; a < n; ++a) outer = std::max(outer, std::abs(x[a]));
    }
  }
  field.outer_margin = field.evaluated ? d.outer_radius - outer : 0.0;
  return field;
}

double radial_scalar_curvature(const RadialFunction& phi, int n, double r) {
  const double p1 = phi.d1(r), p2 = phi.d2(r);
  const double q = 1.0 + p1 * p1;
  const double psi = p1 * p1 / q;
  const double dpsi = 2.0 * p1 * p2 / (q * q);
  const double deriv = (n - 2) * std::pow(r, n - 3) * psi + std::pow(r, n - 2) * dpsi;
  return (n - 1) * std::pow(r, 1 - n) * deriv;
}

// ---------------------------------------------------------------- level sets

LevelSetProfile extract_level_set(const GraphManifold& g, double h, const LevelSetOptions& opts) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  if (n < 2) throw ValidationError("level sets need n >= 2");
  if (opts.curvature && opts.mode == DerivativeMode::Analytic && !g.profile())
    throw ValidationError("analytic curvature requested but the manifold has no profile");
  const bool analytic = opts.curvature && g.profile() &&
                        (opts.mode == DerivativeMode::Analytic || opts.mode == DerivativeMode::Auto);
  const auto perms = permutations(n);
  const std::size_t cells = cell_count(d);
  const std::size_t chunks = (cells + kChunk - 1) / kChunk;
  std::vector<LevelAccumulator> partial(chunks);
  const double sp = d.spacing;
  const double clip2 = opts.clip_radius ? (*opts.clip_radius) * (*opts.clip_radius) : 0.0;

  parallel_chunks(cells, [&](std::size_t b, std::size_t e) {
    LevelAccumulator acc;
    for (std::size_t cell = b; cell < e; ++cell) {
      const Index base = cell_base(d, cell);
      const CellCorners c = corners(g, base);
      double lo = c.value[0], hi = c.value[0];
      for (int m = 1; m < c.count; ++m) {
        lo = std::min(lo, c.value[m]);
        hi = std::max(hi, c.value[m]);
      }
      if (!(lo < h && hi >= h)) continue;
      if (!c.all_active) {
        acc.hole = true;
        continue;
      }
      if (c.on_boundary) acc.boundary = true;
      const Vec origin = d.position(base);

      std::array<Differentials, 16> corner_diff;
      std::array<bool, 16> corner_ok{};
      bool corner_done = false;

      for (const auto& perm : perms) {
        std::array<int, kMaxDim + 1> mask{};
        for (int k = 1; k <= n; ++k) mask[k] = mask[k - 1] | (1 << perm[k - 1]);
        Vec grad{};
        for (int k = 1; k <= n; ++k) grad[perm[k - 1]] = (c.value[mask[k]] - c.value[mask[k - 1]]) / sp;
        std::array<int, kMaxDim + 1> below{}, above{};
        int nb = 0, na = 0;
        for (int k = 0; k <= n; ++k) {
          if (c.value[mask[k]] < h) {
            below[nb++] = k;
          } else {
            above[na++] = k;
          }
        }
        if (nb == 0 || na == 0) continue;
        acc.min_grad = std::min(acc.min_grad, norm(grad, n));

        auto vertex_pos = [&](int k) {
          Vec x = origin;
          for (int a = 0; a < n; ++a)
            if (mask[k] & (1 << a)) x[a] += sp;
          return x;
        };
        // Crossing point on edge (below[i], above[j]) with its interpolation parameter.
        auto crossing = [&](int i, int j, double* t) {
          const int vb = below[i], va = above[j];
          const double fb = c.value[mask[vb]], fa = c.value[mask[va]];
          *t = (h - fb) / (fa - fb);
          const Vec xb = vertex_pos(vb), xa = vertex_pos(va);
          Vec p{};
          for (int a = 0; a < n; ++a) p[a] = xb[a] + *t * (xa[a] - xb[a]);
          return p;
        };

        const int steps = (nb - 1) + (na - 1);
        for (int path = 0; path < (1 << steps); ++path) {
          if (__builtin_popcount(path) != nb - 1) continue;
          std::array<Vec, kMaxDim> pts{};
          std::array<std::array<double, 2>, kMaxDim> par{};
          std::array<std::array<int, 2>, kMaxDim> ends{};
          int i = 0, j = 0;
          for (int s = 0; s <= steps; ++s) {
            double t = 0.0;
            pts[s] = crossing(i, j, &t);
            par[s] = {1.0 - t, t};
            ends[s] = {below[i], above[j]};
            if (s < steps) {
              if (path & (1 << s)) {
                ++i;
              } else {
                ++j;
              }
            }
          }
          std::array<Vec, kMaxDim> edges{};
          for (int s = 1; s < n; ++s)
            for (int a = 0; a < n; ++a) edges[s - 1][a] = pts[s][a] - pts[0][a];
          const double area = simplex_volume(edges, n - 1, n);
          if (area == 0.0) continue;
          Vec centroid{};
          for (int s = 0; s < n; ++s)
            for (int a = 0; a < n; ++a) centroid[a] += pts[s][a] / n;
          acc.area += area;
          ++acc.facets;
          const bool inside = !opts.clip_radius || norm2(centroid, n) <= clip2;
          if (inside) acc.clipped += area;
          if (!opts.curvature) continue;

          Differentials dd;
          bool have = true;
          if (analytic) {
            dd = g.profile()->differentials(centroid);
          } else {
            if (!corner_done) {
              for (int m = 0; m < c.count; ++m)
                corner_ok[m] = try_differentials(g, c.node[m], DerivativeMode::FiniteDifference, &corner_diff[m]);
              corner_done = true;
            }
            for (int s = 0; s < n && have; ++s) {
              for (int side = 0; side < 2; ++side) {
                const int m = mask[ends[s][side]];
                if (!corner_ok[m]) {
                  have = false;
                  break;
                }
                const double w = par[s][side] / n;
                for (int a = 0; a < n; ++a) {
                  dd.gradient[a] += w * corner_diff[m].gradient[a];
                  for (int bb = 0; bb < n; ++bb) dd.h(a, bb) += w * corner_diff[m].h(a, bb);
                }
              }
            }
          }
          double gn = 0.0;
          const double H = have ? mean_curvature(dd, n, &gn) : std::numeric_limits<double>::quiet_NaN();
          if (!std::isfinite(H)) {
            ++acc.skipped;
            continue;
          }
          acc.min_h = std::min(acc.min_h, H);
          acc.max_h = std::max(acc.max_h, H);
          if (inside) {
            acc.hint += H * area;
            acc.weighted += gn * gn / (1.0 + gn * gn) * H * area;
          }
        }
      }
    }
    partial[b / kChunk] = acc;
  });

  LevelAccumulator total;
  for (const auto& p : partial) total.merge(p);
  LevelSetProfile out;
  out.height = h;
  out.area = total.area;
  out.clipped_area = opts.clip_radius ? total.clipped : total.area;
  out.mean_curvature_integral = total.hint;
  out.weighted_term = total.weighted;
  out.facets = total.facets;
  out.curvature_skipped = total.skipped;
  out.out_of_range = total.facets == 0;
  out.touches_boundary = total.boundary;
  out.touches_hole = total.hole;
  out.min_gradient = total.facets ? total.min_grad : 0.0;
  out.min_mean_curvature = std::isfinite(total.min_h) ? total.min_h : 0.0;
  out.max_mean_curvature = std::isfinite(total.max_h) ? total.max_h : 0.0;
  const double gamma = g.params().gamma > 0.0 ? g.params().gamma : 1.0;
  out.near_critical = total.facets > 0 && total.min_grad < 1e-6 * gamma;
  return out;
}

double level_set_area(const GraphManifold& g, double h, std::optional<double> clip_radius) {
  LevelSetOptions o;
  o.clip_radius = clip_radius;
  return extract_level_set(g, h, o).clipped_area;
}

LevelSetProfile level_set_mean_curvature(const GraphManifold& g, double h, DerivativeMode mode) {
  LevelSetOptions o;
  o.curvature = true;
  o.mode = mode;
  const LevelSetProfile p = extract_level_set(g, h, o);
  if (p.near_critical) throw NumericalError("level set is near-critical: |Df| vanishes on the contour");
  return p;
}

// ---------------------------------------------------------------- volume

VolumeSplit induced_volume_split(const GraphManifold& g, double r, double level, int subsample) {
  const GraphDomain& d = g.domain();
  const int n = d.dim;
  if (!(r >= 0.0)) throw ValidationError("volume radius must be nonnegative");
  if (r > d.outer_radius + 1e-12) throw ValidationError("volume radius exceeds the grid");
  if (subsample < 1) throw ValidationError("subsample must be positive");
  const double sp = d.spacing;
  const double cell_vol = std::pow(sp, n);
  const double sub_vol = std::pow(sp / subsample, n);
  const double hole = d.hole_radius;
  const std::size_t cells = cell_count(d);
  const std::size_t chunks = (cells + kChunk - 1) / kChunk;
  std::vector<VolumeSplit> partial(chunks);
  int sub_total = 1;
  for (int a = 0; a < n; ++a) sub_total *= subsample;
  const int corner_count = 1 << n;
  const double gauss_lo = 0.5 - 0.5 / std::sqrt(3.0);

  parallel_chunks(cells, [&](std::size_t b, std::size_t e) {
    VolumeSplit acc;
    // Multilinear interpolant of the corner values: value and gradient at local u.
    auto eval = [&](const CellCorners& c, const Vec& u, double* f, double* g2) {
      Vec grad{};
      double v = 0.0;
      for (int m = 0; m < corner_count; ++m) {
        Vec wa{};
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
          wa[a] = (m & (1 << a)) ? u[a] : 1.0 - u[a];
          w *= wa[a];
        }
        v += w * c.value[m];
        for (int a = 0; a < n; ++a) {
          double wg = (m & (1 << a)) ? 1.0 : -1.0;
          for (int q = 0; q < n; ++q)
            if (q != a) wg *= wa[q];
          grad[a] += wg * c.value[m];
        }
      }
      *f = v;
      *g2 = norm2(grad, n) / (sp * sp);
    };
    for (std::size_t cell = b; cell < e; ++cell) {
      const Index base = cell_base(d, cell);
      const Vec lo = d.position(base);
      double near2 = 0.0, far2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double x0 = lo[a], x1 = lo[a] + sp;
        const double nearest = (x0 > 0.0) ? x0 : (x1 < 0.0 ? -x1 : 0.0);
        const double farthest = std::max(std::abs(x0), std::abs(x1));
        near2 += nearest * nearest;
        far2 += farthest * farthest;
      }
      if (near2 > r * r) continue;
      if (hole > 0.0 && far2 <= hole * hole) continue;
      const CellCorners c = corners(g, base);
      double fmin = c.value[0], fmax = c.value[0];
      for (int m = 1; m < c.count; ++m) {
        fmin = std::min(fmin, c.value[m]);
        fmax = std::max(fmax, c.value[m]);
      }
      const bool cut = far2 > r * r || (hole > 0.0 && near2 < hole * hole) || (fmin < level && fmax >= level);
      if (!cut) {
        // two-point Gauss rule per axis
        double s = 0.0;
        for (int m = 0; m < corner_count; ++m) {
          Vec u{};
          for (int a = 0; a < n; ++a) u[a] = (m & (1 << a)) ? 1.0 - gauss_lo : gauss_lo;
          double f = 0.0, g2 = 0.0;
          eval(c, u, &f, &g2);
          s += std::sqrt(1.0 + g2);
        }
        (fmax < level ? acc.below : acc.above) += s * cell_vol / corner_count;
        continue;
      }
      for (int idx = 0; idx < sub_total; ++idx) {
        Vec u{}, x{};
        int rest = idx;
        for (int a = 0; a < n; ++a) {
          u[a] = ((rest % subsample) + 0.5) / subsample;
          rest /= subsample;
          x[a] = lo[a] + u[a] * sp;
        }
        const double rad2 = norm2(x, n);
        if (rad2 > r * r) continue;
        if (hole > 0.0 && rad2 < hole * hole) continue;
        double f = 0.0, g2 = 0.0;
        eval(c, u, &f, &g2);
        (f < level ? acc.below : acc.above) += std::sqrt(1.0 + g2) * sub_vol;
      }
    }
    partial[b / kChunk] = acc;
  });

  VolumeSplit total;
  for (const auto& p : partial) {
    total.below += p.below;
    total.above += p.above;
  }
  return total;
}

double induced_volume(const GraphManifold& g, double r, int subsample) {
  return induced_volume_split(g, r, -std::numeric_limits<double>::infinity(), subsample).total();
}

bool outward_area_clamp_check(const GraphManifold& g, double h, double r, double rel_tol) {
  const double clipped = level_set_area(g, h, r);
  return clipped <= sphere_area(g.dim(), r) * (1.0 + rel_tol);
}

}  // namespace afg
