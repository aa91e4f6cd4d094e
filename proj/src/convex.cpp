#include "conevex/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

namespace conevex {

double Polytope::volume() const {
  if (vertices.empty()) return 0.0;
  if (d == 1) return std::max(0.0, vertices[1](0) - vertices[0](0));
  double a = 0.0;
  const std::size_t m = vertices.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& p = vertices[i];
    const Vec& q = vertices[(i + 1) % m];
    a += p(0) * q(1) - p(1) * q(0);
  }
  return std::max(0.0, 0.5 * a);
}

double Polytope::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j) best = std::max(best, (vertices[i] - vertices[j]).norm());
  return best;
}

bool Polytope::contains(const Vec& p, double tol) const {
  if (vertices.empty()) return false;
  if (d == 1) return p(0) >= vertices[0](0) - tol && p(0) <= vertices[1](0) + tol;
  const std::size_t m = vertices.size();
  if (m < 3) {
    // Degenerate polygon: distance to the segment hull.
    for (std::size_t i = 0; i < m; ++i) {
      const Vec& a = vertices[i];
      const Vec& b = vertices[(i + 1) % m];
      Vec ab = b - a;
      double t = ab.squaredNorm() > 0 ? std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0) : 0.0;
      if ((a + t * ab - p).norm() <= tol) return true;
    }
    return false;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = vertices[i];
    const Vec& b = vertices[(i + 1) % m];
    Vec ab = b - a;
    const double len = ab.norm();
    if (len == 0.0) continue;
    const double cross = ab(0) * (p(1) - a(1)) - ab(1) * (p(0) - a(0));
    if (cross < -tol * len) return false;
  }
  return true;
}

Polytope box_polytope(const Vec& lo, const Vec& hi) {
  Polytope P;
  P.d = static_cast<int>(lo.size());
  if (P.d == 1) {
    P.vertices = {lo, hi};
    P.edge_tags = {-1, -1};
    return P;
  }
  Vec a(2), b(2), c(2), e(2);
  a << lo(0), lo(1);
  b << hi(0), lo(1);
  c << hi(0), hi(1);
  e << lo(0), hi(1);
  P.vertices = {a, b, c, e};
  P.edge_tags = {-1, -1, -1, -1};
  return P;
}

Polytope clip_halfspaces(Polytope P, const std::vector<Vec>& e, const std::vector<double>& b,
                         const std::vector<int>& tags) {
  for (std::size_t k = 0; k < e.size() && !P.vertices.empty(); ++k) {
    const Vec& n = e[k];
    const double bk = b[k];
    const int tag = tags.empty() ? static_cast<int>(k) : tags[k];
    if (P.d == 1) {
      const double c = n(0);
      if (c > 0) {
        const double lim = bk / c;
        if (lim < P.vertices[1](0)) {
          P.vertices[1](0) = lim;
          P.edge_tags[1] = tag;
        }
      } else if (c < 0) {
        const double lim = bk / c;
        if (lim > P.vertices[0](0)) {
          P.vertices[0](0) = lim;
          P.edge_tags[0] = tag;
        }
      } else if (bk < 0) {
        P.vertices.clear();
      }
      if (!P.vertices.empty() && P.vertices[1](0) < P.vertices[0](0)) {
        P.vertices.clear();
        P.edge_tags.clear();
      }
      continue;
    }
    const std::size_t m = P.vertices.size();
    double scale = std::abs(bk);
    for (const auto& v : P.vertices) scale = std::max(scale, std::abs(n.dot(v)));
    const double tol = 1e-14 * scale;
    std::vector<Vec> out;
    std::vector<int> out_tags;
    out.reserve(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
      const Vec& p = P.vertices[i];
      const Vec& q = P.vertices[(i + 1) % m];
      const double vp = n.dot(p) - bk;
      const double vq = n.dot(q) - bk;
      const bool pin = vp <= tol;
      const bool qin = vq <= tol;
      if (pin) {
        out.push_back(p);
        out_tags.push_back(P.edge_tags[i]);
        if (!qin) {
          const double a = vp / (vp - vq);
          out.push_back(p + a * (q - p));
          out_tags.push_back(tag);
        }
      } else if (qin) {
        const double a = vp / (vp - vq);
        out.push_back(p + a * (q - p));
        out_tags.push_back(P.edge_tags[i]);
      }
    }
    P.vertices = std::move(out);
    P.edge_tags = std::move(out_tags);
  }
  return P;
}

GridFn legendre_transform(const GridFn& f, const GridSpec& target, Exec exec) {
  if (f.spec.d != target.d) throw ValidationError("legendre_transform: dimension mismatch");
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.masked(i)) nodes.push_back(i);
  if (nodes.empty()) throw ValidationError("legendre_transform: empty mask");
  const int d = f.spec.d;
  Mat X(d, static_cast<Eigen::Index>(nodes.size()));
  Vec F(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    X.col(static_cast<Eigen::Index>(k)) = f.spec.node(nodes[k]);
    F(static_cast<Eigen::Index>(k)) = f.values[nodes[k]];
  }
  GridFn g(target);
  const long long N = static_cast<long long>(target.size());
  const Eigen::Index M = X.cols();
  auto kernel = [&](long long t) {
    const Vec p = target.node(static_cast<std::size_t>(t));
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < M; ++k) {
      const double v = X.col(k).dot(p) - F(k);
      if (v > best) best = v;
    }
    g.values[static_cast<std::size_t>(t)] = best;
    g.mask[static_cast<std::size_t>(t)] = 1;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long t = 0; t < N; ++t) kernel(t);
  } else {
    for (long long t = 0; t < N; ++t) kernel(t);
  }
  g.convex = true;
  return g;
}

GridSpec default_slope_grid(const GridFn& f) {
  const int d = f.spec.d;
  Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.masked(i)) continue;
    for (int a = 0; a < d; ++a) {
      std::array<int, 3> e{0, 0, 0};
      e[a] = 1;
      std::size_t j;
      if (f.spec.offset(i, e, j) && f.masked(j)) {
        const double s = (f.values[j] - f.values[i]) / f.spec.h(a);
        lo(a) = std::min(lo(a), s);
        hi(a) = std::max(hi(a), s);
      }
    }
  }
  for (int a = 0; a < d; ++a) {
    if (!std::isfinite(lo(a))) throw ValidationError("default_slope_grid: no slopes observed");
    const int n = f.spec.n[a];
    double span = hi(a) - lo(a);
    if (span < 1e-12) span = 1e-6;
    const double margin = span / std::max(1, n - 3);
    lo(a) -= margin;
    hi(a) += margin;
  }
  GridSpec s = GridSpec::box(lo, hi, f.spec.n[0]);
  s.n = f.spec.n;
  return s;
}

GridFn biconjugate(const GridFn& f, Exec exec) {
  GridFn g = legendre_transform(f, default_slope_grid(f), exec);
  GridFn ff = legendre_transform(g, f.spec, exec);
  for (std::size_t i = 0; i < ff.size(); ++i) {
    ff.mask[i] = f.mask[i];
    if (!ff.mask[i]) ff.values[i] = 0.0;
  }
  ff.convex = true;
  return ff;
}

Polytope subgradient_cell(const GridFn& f, std::size_t node, int radius) {
  if (!f.convex) throw ValidationError("subgradient_cell: convexity flag not set");
  if (!f.interior(node, radius)) throw ValidationError("subgradient_cell: boundary node");
  const int d = f.spec.d;
  if (d > 2) throw ValidationError("subgradient_cell: d must be 1 or 2");
  const double s0 = f.values[node];
  // Exact starting box from the axis neighbours.
  Vec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    std::array<int, 3> e{0, 0, 0}, me{0, 0, 0};
    e[a] = 1;
    me[a] = -1;
    std::size_t jp, jm;
    f.spec.offset(node, e, jp);
    f.spec.offset(node, me, jm);
    hi(a) = (f.values[jp] - s0) / f.spec.h(a);
    lo(a) = (s0 - f.values[jm]) / f.spec.h(a);
  }
  Polytope P;
  if ((hi - lo).minCoeff() < 0.0) {
    P.d = d;
    return P;
  }
  P = box_polytope(lo, hi);
  std::vector<Vec> es;
  std::vector<double> bs;
  const int w = 2 * radius + 1;
  int total = 1;
  for (int a = 0; a < d; ++a) total *= w;
  for (int c = 0; c < total; ++c) {
    std::array<int, 3> off{0, 0, 0};
    int r = c, nz = 0;
    for (int a = 0; a < d; ++a) {
      off[a] = r % w - radius;
      r /= w;
      if (off[a] != 0) ++nz;
    }
    if (nz == 0) continue;
    if (nz == 1 && (std::abs(off[0]) + std::abs(off[1]) + std::abs(off[2])) == 1) continue;
    std::size_t j;
    f.spec.offset(node, off, j);
    Vec e(d);
    for (int a = 0; a < d; ++a) e(a) = off[a] * f.spec.h(a);
    es.push_back(e);
    bs.push_back(f.values[j] - s0);
  }
  return clip_halfspaces(P, es, bs, {});
}

namespace {

struct Tri {
  int a, b, c;
  Eigen::Vector3d n;  // unit outward normal
  double off = 0.0;   // n.X = off on the plane
  bool alive = true;
};

Tri make_tri(const std::vector<Eigen::Vector3d>& P, int a, int b, int c) {
  Tri t{a, b, c, (P[b] - P[a]).cross(P[c] - P[a]), 0.0, true};
  const double len = t.n.norm();
  if (len > 0.0) t.n /= len;
  t.off = t.n.dot(P[a]);
  return t;
}

// Incremental 3D hull; returns the alive triangles with outward orientation.
std::vector<Tri> hull3d(const std::vector<Eigen::Vector3d>& P, int i0, int i1, int i2, int i3, double eps) {
  std::vector<Tri> F;
  std::map<std::pair<int, int>, int> edge_face;
  auto add = [&](int a, int b, int c) {
    F.push_back(make_tri(P, a, b, c));
    const int f = static_cast<int>(F.size()) - 1;
    edge_face[{a, b}] = f;
    edge_face[{b, c}] = f;
    edge_face[{c, a}] = f;
  };
  const Eigen::Vector3d centre = (P[i0] + P[i1] + P[i2] + P[i3]) / 4.0;
  const int quad[4][3] = {{i0, i1, i2}, {i0, i1, i3}, {i0, i2, i3}, {i1, i2, i3}};
  for (const auto& q : quad) {
    Tri t = make_tri(P, q[0], q[1], q[2]);
    if (t.n.dot(centre) - t.off > 0.0)
      add(q[0], q[2], q[1]);
    else
      add(q[0], q[1], q[2]);
  }
  for (int p = 0; p < static_cast<int>(P.size()); ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(F.size()); ++f)
      if (F[f].alive && F[f].n.dot(P[p]) - F[f].off > eps) visible.push_back(f);
    if (visible.empty()) continue;
    for (int f : visible) F[f].alive = false;
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const int e[3][2] = {{F[f].a, F[f].b}, {F[f].b, F[f].c}, {F[f].c, F[f].a}};
      for (const auto& uv : e) {
        auto it = edge_face.find({uv[1], uv[0]});
        if (it != edge_face.end() && F[it->second].alive) horizon.emplace_back(uv[0], uv[1]);
      }
    }
    for (int f : visible) {
      edge_face.erase({F[f].a, F[f].b});
      edge_face.erase({F[f].b, F[f].c});
      edge_face.erase({F[f].c, F[f].a});
    }
    for (const auto& [u, v] : horizon) add(u, v, p);
  }
  std::vector<Tri> out;
  for (const auto& t : F)
    if (t.alive) out.push_back(t);
  return out;
}

}  // namespace

PLGraphHull::PLGraphHull(std::vector<Vec> points, std::vector<double> heights)
    : pts_(std::move(points)), z_(std::move(heights)) {
  if (pts_.empty() || pts_.size() != z_.size()) throw ValidationError("hull: need matching points and heights");
  d_ = static_cast<int>(pts_[0].size());
  if (d_ < 1 || d_ > 2) throw ValidationError("hull: d must be 1 or 2");
  const int n = static_cast<int>(pts_.size());
  if (n < d_ + 1) throw ValidationError("hull: need at least d+1 samples");
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    if (pts_[i].size() != d_) throw ValidationError("hull: inconsistent point dimension");
    scale = std::max({scale, pts_[i].cwiseAbs().maxCoeff(), std::abs(z_[i])});
  }
  scale = std::max(scale, 1e-300);
  if (d_ == 1) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (pts_[a](0) != pts_[b](0)) return pts_[a](0) < pts_[b](0);
      return z_[a] < z_[b];
    });
    std::vector<int> chain;
    for (int i : order) {
      if (!chain.empty() && pts_[chain.back()](0) == pts_[i](0)) continue;
      while (chain.size() >= 2) {
        const int a = chain[chain.size() - 2], b = chain.back();
        const double cross = (pts_[b](0) - pts_[a](0)) * (z_[i] - z_[a]) - (z_[b] - z_[a]) * (pts_[i](0) - pts_[a](0));
        if (cross <= 1e-14 * scale * scale) chain.pop_back();
        else break;
      }
      chain.push_back(i);
    }
    if (chain.size() < 2) throw ValidationError("hull: samples do not span");
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      const int a = chain[k], b = chain[k + 1];
      Facet f;
      f.slope = Vec::Constant(1, (z_[b] - z_[a]) / (pts_[b](0) - pts_[a](0)));
      f.offset = z_[a] - f.slope(0) * pts_[a](0);
      f.vertices = {a, b};
      facets_.push_back(std::move(f));
    }
    return;
  }
  // d = 2: lower facets of the 3D hull of the lifted points plus one point far above.
  std::vector<Eigen::Vector3d> P(n + 1);
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double zmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    P[i] = Eigen::Vector3d(pts_[i](0), pts_[i](1), z_[i]);
    centroid += Eigen::Vector2d(pts_[i](0), pts_[i](1));
    zmax = std::max(zmax, z_[i]);
  }
  centroid /= n;
  P[n] = Eigen::Vector3d(centroid(0), centroid(1), zmax + 10.0 * scale + 1.0);
  int i0 = 0, i1 = -1, i2 = -1;
  double best = 0.0;
  for (int i = 1; i < n; ++i) {
    const double dist = (pts_[i] - pts_[0]).norm();
    if (dist > best) {
      best = dist;
      i1 = i;
    }
  }
  best = 0.0;
  if (i1 >= 0) {
    const Vec u = pts_[i1] - pts_[0];
    for (int i = 1; i < n; ++i) {
      const Vec w = pts_[i] - pts_[0];
      const double area = std::abs(u(0) * w(1) - u(1) * w(0));
      if (area > best) {
        best = area;
        i2 = i;
      }
    }
  }
  if (i1 < 0 || i2 < 0 || best <= 1e-12 * scale * scale) throw ValidationError("hull: samples do not span");
  const auto tris = hull3d(P, i0, i1, i2, n, 1e-12 * scale);
  for (const auto& t : tris) {
    if (!(t.n(2) < -1e-12)) continue;
    Facet f;
    f.slope = Vec(2);
    f.slope << -t.n(0) / t.n(2), -t.n(1) / t.n(2);
    f.offset = t.off / t.n(2);
    f.vertices = {t.a, t.b, t.c};
    facets_.push_back(std::move(f));
  }
  if (facets_.empty()) throw ValidationError("hull: no lower facets");
}

double PLGraphHull::evaluate(const Vec& y) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& f : facets_) best = std::max(best, f.slope.dot(y) + f.offset);
  return best;
}

Vec PLGraphHull::slope_at(const Vec& y) const {
  double best = -std::numeric_limits<double>::infinity();
  const Facet* arg = nullptr;
  for (const auto& f : facets_) {
    const double v = f.slope.dot(y) + f.offset;
    if (v > best) {
      best = v;
      arg = &f;
    }
  }
  return arg->slope;
}

PLGraphHull envelope_from_boundary(const std::vector<std::pair<Vec, double>>& samples) {
  std::vector<Vec> pts;
  std::vector<double> z;
  for (const auto& [y, v] : samples) {
    pts.push_back(y);
    z.push_back(v);
  }
  return PLGraphHull(std::move(pts), std::move(z));
}

}  // namespace conevex
