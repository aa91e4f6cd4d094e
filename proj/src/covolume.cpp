#include "conevex/covolume.hpp"

#include "conevex/quadrature.hpp"
#include "conevex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conevex {

namespace {

double pair_sum(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return pairwise_sum(p);
}

void check_inside(const TauBody& b) {
  for (double v : b.h)
    if (v < -1e-12) throw ValidationError("covolume: K is not inside D_tau");
}

}  // namespace

CovolumeReport covolume(const TauBody& body, int path_nodes, Exec exec) {
  check_inside(body);
  if (path_nodes < 1) throw ValidationError("covolume: need at least one path node");
  TauBody k = body;
  CovolumeReport rep;
  rep.restored_nodes = restore_convexity(k);
  std::vector<double> x, w;
  gauss_legendre01(path_nodes, x, w);
  rep.path_samples = path_nodes;
  std::vector<double> terms;
  for (int i = 0; i < path_nodes; ++i) {
    TauBody kl = k;
    for (double& v : kl.h) v *= x[i];
    const TorusArea a = torus_area(kl, false, exec);
    const double val = pair_sum(k.h, a.mass);
    rep.path_integrand.push_back(val);
    terms.push_back(w[i] * val);
  }
  rep.value = pairwise_sum(terms);
  return rep;
}

namespace {

struct Plane {
  Vec W;
  double c;
};

// Image of X under the cached element with largest height along Y.
Vec dl_translate(const std::vector<GroupElement>& cache, const Vec& X, const Vec& Y, std::size_t* which) {
  std::size_t best = 0;
  double hb = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cache.size(); ++c) {
    const double hgt = (cache[c].lin * X + cache[c].tau).dot(Y);
    if (hgt > hb) {
      hb = hgt;
      best = c;
    }
  }
  if (which) *which = best;
  return cache[best].lin * X + cache[best].tau;
}

}  // namespace

CovolumeMc covolume_mc(const TauBody& body, const Vec& y0, std::size_t samples, std::uint64_t seed, Exec exec) {
  check_inside(body);
  const FundamentalDomain& dom = *body.dom;
  const MaximalDomain& dmax = *body.dmax;
  if (dmax.mode != MaximalDomain::Mode::Coboundary) throw ValidationError("covolume_mc: coboundary instances only");
  TauBody k = body;
  restore_convexity(k);
  const int d = dom.d();
  const ConeModel& cone = dom.cone();
  const auto& cache = dom.action().cached();
  Vec Y0(d + 1);
  Y0.head(d) = y0;
  Y0(d) = -1.0;
  const double tmax = cosmological_extremes(k).t_max;
  CovolumeMc out;
  out.samples = samples;
  out.word_bound = dom.action().word_bound();
  if (tmax == 0.0) return out;

  // Sampling box and normal window from translated probes of the region.
  const Mat Tinv = dom.translations().inverse();
  Vec lo = Vec::Constant(d + 1, std::numeric_limits<double>::infinity()), hi = -lo;
  Vec tlo = Vec::Constant(d, std::numeric_limits<double>::infinity()), thi = -tlo;
  auto probe = [&](std::uint64_t s, std::uint64_t i, Vec& Q, Vec& th_out) {
    Vec th(d);
    for (int a = 0; a < d; ++a) th(a) = counter_uniform(s, static_cast<std::uint64_t>(a), i) - 0.5;
    const double t = tmax * counter_uniform(s, static_cast<std::uint64_t>(d), i);
    const Vec y = dom.y_of_xi(dom.translations() * th);
    const Vec P = dmax.v + t * c_normal(dom.sphere(), y);
    std::size_t g = 0;
    Q = dl_translate(cache, P, Y0, &g);
    th_out = Tinv * dom.xi_of_y(dual_projective_action(cone, cache[g].lin, y));
  };
  const std::size_t nprobe = 4000;
  for (std::size_t i = 0; i < nprobe; ++i) {
    Vec Q, th;
    probe(seed ^ 0x9e3779b97f4a7c15ULL, i, Q, th);
    lo = lo.cwiseMin(Q);
    hi = hi.cwiseMax(Q);
    tlo = tlo.cwiseMin(th);
    thi = thi.cwiseMax(th);
  }
  const Vec pad = 0.1 * (hi - lo);
  lo -= pad;
  hi += pad;
  tlo.array() -= 0.5;
  thi.array() += 0.5;
  for (std::size_t i = 0; i < 1000; ++i) {
    Vec Q, th;
    probe(seed ^ 0x5851f42d4c957f2dULL, i, Q, th);
    if ((Q.array() < lo.array()).any() || (Q.array() > hi.array()).any()) ++out.escapes;
  }

  // Supporting planes of K with normals in the window: X.W <= s_j + tau.W.
  std::vector<Plane> planes;
  for (const auto& g : cache) {
    const Mat ginvT = g.lin.inverse().transpose();
    for (std::size_t j = 0; j < dom.size(); ++j) {
      Vec Yj(d + 1);
      Yj.head(d) = dom.y(j);
      Yj(d) = -1.0;
      const Vec W = ginvT * Yj;
      if (!(W(d) < 0.0)) continue;
      const Vec yimg = W.head(d) / (-W(d));
      if (!cone.inside_omega_star(yimg)) continue;
      const Vec th = Tinv * dom.xi_of_y(yimg);
      if ((th.array() < tlo.array()).any() || (th.array() > thi.array()).any()) continue;
      planes.push_back(Plane{W, k.support_at(j) + g.tau.dot(W)});
    }
  }

  const double box = (hi - lo).prod();
  std::vector<std::uint8_t> hit(samples, 0);
  const long long ns = static_cast<long long>(samples);
  auto kernel = [&](long long ii) {
    const std::uint64_t i = static_cast<std::uint64_t>(ii);
    Vec X(d + 1);
    for (int a = 0; a <= d; ++a) X(a) = lo(a) + (hi(a) - lo(a)) * counter_uniform(seed, static_cast<std::uint64_t>(a), i);
    if (!dmax.contains(cone, X)) return;
    const double base = X.dot(Y0);
    for (const auto& g : cache)
      if ((g.lin * X + g.tau).dot(Y0) > base) return;
    for (const auto& p : planes)
      if (X.dot(p.W) > p.c) {
        hit[i] = 1;
        return;
      }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (long long i = 0; i < ns; ++i) kernel(i);
  } else {
    for (long long i = 0; i < ns; ++i) kernel(i);
  }
  for (auto h : hit) out.hits += h;
  const double p = samples ? static_cast<double>(out.hits) / samples : 0.0;
  out.value = box * p;
  out.stderr_ = samples ? box * std::sqrt(p * (1.0 - p) / samples) : 0.0;
  return out;
}

double convexity_gap(const TauBody& b0, const TauBody& b1, double t, int path_nodes) {
  if (b0.dom != b1.dom || b0.dmax != b1.dmax) throw ValidationError("convexity_gap: bodies on different domains");
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("convexity_gap: weight must lie in (0,1)");
  TauBody mid = b0;
  for (std::size_t i = 0; i < mid.h.size(); ++i) mid.h[i] = (1.0 - t) * b0.h[i] + t * b1.h[i];
  const double c0 = covolume(b0, path_nodes).value;
  const double c1 = covolume(b1, path_nodes).value;
  const double cm = covolume(mid, path_nodes).value;
  return (1.0 - t) * c0 + t * c1 - cm;
}

GateauxReport gateaux_check(const TauBody& body, const std::vector<double>& f, const std::vector<double>& ts,
                            int path_nodes) {
  if (f.size() != body.h.size()) throw ValidationError("gateaux_check: perturbation has wrong size");
  GateauxReport rep;
  TauBody base = body;
  restore_convexity(base);
  const TorusArea a = torus_area(base);
  rep.target = pair_sum(f, a.mass);
  const double c0 = covolume(base, path_nodes).value;
  bool central = true;
  for (std::size_t i = 0; i < base.h.size(); ++i)
    if (base.h[i] - ts.front() * f[i] < 0.0) central = false;
  rep.central = central;
  for (double t : ts) {
    TauBody plus = base, minus = base;
    for (std::size_t i = 0; i < plus.h.size(); ++i) {
      plus.h[i] += t * f[i];
      minus.h[i] -= t * f[i];
      if (plus.h[i] < -1e-12) rep.escaped = true;
    }
    if (rep.escaped) break;
    const double q = central ? (covolume(plus, path_nodes).value - covolume(minus, path_nodes).value) / (2.0 * t)
                             : (covolume(plus, path_nodes).value - c0) / t;
    rep.t.push_back(t);
    rep.quotient.push_back(q);
    rep.rel_error.push_back(std::abs(q - rep.target) / std::max(std::abs(rep.target), 1e-300));
  }
  return rep;
}

SandwichReport covolume_sandwich(const TauBody& k0, const TauBody& k1, int path_nodes) {
  if (k0.dom != k1.dom) throw ValidationError("covolume_sandwich: bodies on different domains");
  std::vector<double> dh(k0.h.size());
  for (std::size_t i = 0; i < dh.size(); ++i) {
    dh[i] = k1.h[i] - k0.h[i];
    if (dh[i] < -1e-12) throw ValidationError("covolume_sandwich: K1 is not inside K0");
  }
  SandwichReport r;
  r.lower = pair_sum(dh, torus_area(k0).mass);
  r.upper = pair_sum(dh, torus_area(k1).mass);
  r.difference = covolume(k1, path_nodes).value - covolume(k0, path_nodes).value;
  return r;
}

std::vector<double> torus_bump(const FundamentalDomain& dom, const Vec& theta0, double radius) {
  std::vector<double> f(dom.size(), 0.0);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    Vec dth = dom.theta(i) - theta0;
    for (int a = 0; a < dth.size(); ++a) dth(a) -= std::round(dth(a));
    const double r = dth.norm() / radius;
    if (r < 1.0) f[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * r));
  }
  return f;
}

}  // namespace conevex
