#include "conevex/grid.hpp"

#include <algorithm>
#include <cmath>

namespace conevex {

GridSpec GridSpec::box(const Vec& lo, const Vec& hi, int n_per_axis) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > 3) throw ValidationError("grid: dimension must be 1..3");
  if (n_per_axis < 3) throw ValidationError("grid: need at least 3 nodes per axis");
  GridSpec s;
  s.d = static_cast<int>(lo.size());
  s.n.assign(s.d, n_per_axis);
  s.lo = lo;
  s.hi = hi;
  for (int k = 0; k < s.d; ++k)
    if (!(hi(k) > lo(k))) throw ValidationError("grid: empty box");
  return s;
}

GridSpec GridSpec::omega_star(const ConeModel& cone, int n_per_axis) {
  Vec lo, hi;
  cone.bounding_box_star(lo, hi);
  return box(lo, hi, n_per_axis);
}

double GridSpec::hmax() const {
  double m = 0.0;
  for (int k = 0; k < d; ++k) m = std::max(m, h(k));
  return m;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < d; ++k) v *= h(k);
  return v;
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int k = 0; k < d; ++k) s *= static_cast<std::size_t>(n[k]);
  return s;
}

std::array<int, 3> GridSpec::multi(std::size_t idx) const {
  std::array<int, 3> m{0, 0, 0};
  for (int k = 0; k < d; ++k) {
    m[k] = static_cast<int>(idx % n[k]);
    idx /= n[k];
  }
  return m;
}

std::size_t GridSpec::flat(const std::array<int, 3>& m) const {
  std::size_t idx = 0;
  for (int k = d - 1; k >= 0; --k) idx = idx * n[k] + m[k];
  return idx;
}

Vec GridSpec::node(std::size_t idx) const {
  auto m = multi(idx);
  Vec y(d);
  for (int k = 0; k < d; ++k) y(k) = lo(k) + m[k] * h(k);
  return y;
}

bool GridSpec::offset(std::size_t idx, const std::array<int, 3>& off, std::size_t& out) const {
  auto m = multi(idx);
  for (int k = 0; k < d; ++k) {
    int v = m[k] + off[k];
    if (periodic) {
      v %= n[k];
      if (v < 0) v += n[k];
    } else if (v < 0 || v >= n[k]) {
      return false;
    }
    m[k] = v;
  }
  out = flat(m);
  return true;
}

bool GridSpec::same_as(const GridSpec& o) const {
  if (d != o.d || n != o.n || periodic != o.periodic) return false;
  return (lo - o.lo).cwiseAbs().maxCoeff() < 1e-12 && (hi - o.hi).cwiseAbs().maxCoeff() < 1e-12;
}

GridFn::GridFn(GridSpec s) : spec(std::move(s)) {
  values.assign(spec.size(), 0.0);
  mask.assign(spec.size(), 0);
}

bool GridFn::interior(std::size_t idx, int radius) const {
  const int d = spec.d;
  std::array<int, 3> off{0, 0, 0};
  const int w = 2 * radius + 1;
  int total = 1;
  for (int k = 0; k < d; ++k) total *= w;
  for (int c = 0; c < total; ++c) {
    int r = c;
    for (int k = 0; k < d; ++k) {
      off[k] = r % w - radius;
      r /= w;
    }
    std::size_t j;
    if (!spec.offset(idx, off, j) || !masked(j)) return false;
  }
  return true;
}

bool GridFn::bilinear(const Vec& y, double& value, double* error_bound) const {
  const int d = spec.d;
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int k = 0; k < d; ++k) {
    const double t = (y(k) - spec.lo(k)) / spec.h(k);
    int i = static_cast<int>(std::floor(t));
    if (i < 0 || i >= spec.n[k] - 1) {
      if (i == spec.n[k] - 1 && t <= spec.n[k] - 1 + 1e-12) {
        i = spec.n[k] - 2;
      } else {
        return false;
      }
    }
    base[k] = i;
    frac[k] = t - i;
  }
  value = 0.0;
  std::array<double, 3> curv{0, 0, 0};
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    std::array<int, 3> m = base;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const int bit = (c >> k) & 1;
      m[k] += bit;
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    const std::size_t j = spec.flat(m);
    if (!masked(j)) return false;
    value += w * values[j];
    if (error_bound == nullptr) continue;
    for (int k = 0; k < d; ++k) {
      std::array<int, 3> e{0, 0, 0}, me{0, 0, 0};
      e[k] = 1;
      me[k] = -1;
      std::size_t jp, jm;
      if (spec.offset(j, e, jp) && spec.offset(j, me, jm) && masked(jp) && masked(jm))
        curv[k] = std::max(curv[k], std::abs(values[jp] - 2.0 * values[j] + values[jm]));
    }
  }
  // |f - I f| <= sum_k h_k^2 |f_kk| / 8, with a safety factor of 2 on the sampled curvature.
  if (error_bound != nullptr) *error_bound = 2.0 * (curv[0] + curv[1] + curv[2]) / 8.0;
  return true;
}

GridFn sample_on(const GridSpec& spec, const std::vector<std::uint8_t>& mask,
                 const std::function<double(const Vec&)>& f) {
  GridFn g(spec);
  g.mask = mask;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.mask[i]) g.values[i] = f(spec.node(i));
  return g;
}

GridFn sample_omega_star(const ConeModel& cone, int n_per_axis, const std::function<double(const Vec&)>& f) {
  GridSpec spec = GridSpec::omega_star(cone, n_per_axis);
  std::vector<std::uint8_t> mask(spec.size(), 0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    Vec y = spec.node(i);
    mask[i] = (cone.inside_omega_star(y) && cone.boundary_distance(y) > 1e-12) ? 1 : 0;
  }
  return sample_on(spec, mask, f);
}

namespace {

std::vector<std::array<int, 3>> convexity_directions(int d) {
  std::vector<std::array<int, 3>> dirs;
  if (d == 1) return {{1, 0, 0}};
  if (d == 2) return {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, -1, 0}};
  return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}};
}

}  // namespace

bool check_discrete_convexity(const GridFn& f, double tol) {
  const auto dirs = convexity_directions(f.spec.d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.masked(i)) continue;
    for (const auto& e : dirs) {
      std::array<int, 3> me{-e[0], -e[1], -e[2]};
      std::size_t jp, jm;
      if (!f.spec.offset(i, e, jp) || !f.spec.offset(i, me, jm)) continue;
      if (!f.masked(jp) || !f.masked(jm)) continue;
      const double scale = 1.0 + std::max({std::abs(f.values[i]), std::abs(f.values[jp]), std::abs(f.values[jm])});
      if (f.values[jp] + f.values[jm] - 2.0 * f.values[i] < -tol * scale) return false;
    }
  }
  return true;
}

namespace {

// Second difference along lattice vector e (approximates E^T H E).
bool second_diff(const GridFn& f, std::size_t i, const std::array<int, 3>& e, bool fourth, double& out) {
  std::array<int, 3> me{-e[0], -e[1], -e[2]};
  std::size_t p1, m1;
  if (!f.spec.offset(i, e, p1) || !f.spec.offset(i, me, m1) || !f.masked(p1) || !f.masked(m1)) return false;
  if (fourth) {
    std::array<int, 3> e2{2 * e[0], 2 * e[1], 2 * e[2]};
    std::array<int, 3> me2{-2 * e[0], -2 * e[1], -2 * e[2]};
    std::size_t p2, m2;
    if (!f.spec.offset(i, e2, p2) || !f.spec.offset(i, me2, m2) || !f.masked(p2) || !f.masked(m2)) return false;
    out = (-f.values[p2] + 16.0 * f.values[p1] - 30.0 * f.values[i] + 16.0 * f.values[m1] - f.values[m2]) / 12.0;
    return true;
  }
  out = f.values[p1] - 2.0 * f.values[i] + f.values[m1];
  return true;
}

bool first_diff(const GridFn& f, std::size_t i, int axis, bool fourth, double& out) {
  std::array<int, 3> e{0, 0, 0};
  e[axis] = 1;
  std::array<int, 3> me{0, 0, 0};
  me[axis] = -1;
  std::size_t p1, m1;
  if (!f.spec.offset(i, e, p1) || !f.spec.offset(i, me, m1) || !f.masked(p1) || !f.masked(m1)) return false;
  const double h = f.spec.h(axis);
  if (fourth) {
    e[axis] = 2;
    me[axis] = -2;
    std::size_t p2, m2;
    if (!f.spec.offset(i, e, p2) || !f.spec.offset(i, me, m2) || !f.masked(p2) || !f.masked(m2)) return false;
    out = (-f.values[p2] + 8.0 * f.values[p1] - 8.0 * f.values[m1] + f.values[m2]) / (12.0 * h);
    return true;
  }
  out = (f.values[p1] - f.values[m1]) / (2.0 * h);
  return true;
}

bool hessian_order(const GridFn& f, std::size_t i, bool fourth, Mat& H) {
  const int d = f.spec.d;
  H.resize(d, d);
  for (int a = 0; a < d; ++a) {
    std::array<int, 3> e{0, 0, 0};
    e[a] = 1;
    double v;
    if (!second_diff(f, i, e, fourth, v)) return false;
    H(a, a) = v / (f.spec.h(a) * f.spec.h(a));
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      std::array<int, 3> ep{0, 0, 0}, em{0, 0, 0};
      ep[a] = 1;
      ep[b] = 1;
      em[a] = 1;
      em[b] = -1;
      double vp, vm;
      if (!second_diff(f, i, ep, fourth, vp) || !second_diff(f, i, em, fourth, vm)) return false;
      H(a, b) = H(b, a) = (vp - vm) / (4.0 * f.spec.h(a) * f.spec.h(b));
    }
  }
  return true;
}

}  // namespace

bool gradient_fd(const GridFn& f, std::size_t idx, Vec& g) {
  const int d = f.spec.d;
  g.resize(d);
  for (int a = 0; a < d; ++a) {
    double v;
    if (!first_diff(f, idx, a, true, v) && !first_diff(f, idx, a, false, v)) return false;
    g(a) = v;
  }
  return true;
}

bool hessian_fd(const GridFn& f, std::size_t idx, Mat& H) {
  if (!f.masked(idx)) return false;
  if (hessian_order(f, idx, true, H)) return true;
  return hessian_order(f, idx, false, H);
}

CellSet disk_cells(const GridFn& f, const Vec& center, double radius) {
  CellSet out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.masked(i) && (f.spec.node(i) - center).norm() < radius) out.push_back(i);
  return out;
}

CellSet masked_cells(const GridFn& f, int radius) {
  CellSet out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.masked(i) && f.interior(i, radius)) out.push_back(i);
  return out;
}

}  // namespace conevex
