#include "conevex/invariant.hpp"

#include "conevex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conevex {

double MaximalDomain::value(const Vec& y) const {
  if (mode == Mode::Coboundary) return v.head(y.size()).dot(y) - v(y.size());
  return envelope.evaluate(y);
}

Vec MaximalDomain::gradient(const Vec& y) const {
  if (mode == Mode::Coboundary) return v.head(y.size());
  return envelope.slope_at(y);
}

bool MaximalDomain::contains(const ConeModel& cone, const Vec& X) const {
  if (mode == Mode::Coboundary) return cone.in_cone(X - v);
  const int d = cone.d();
  for (const auto& [y, g] : boundary_data)
    if (X.head(d).dot(y) - X(d) > g) return false;
  return true;
}

MaximalDomain maximal_domain(const GroupAction& action, const ConeModel& cone, int n_per_axis,
                             const std::vector<std::pair<Vec, double>>& boundary_samples) {
  MaximalDomain m;
  const int dim = cone.dim();
  bool trivial = true;
  for (const auto& g : action.generators()) trivial = trivial && g.tau.cwiseAbs().maxCoeff() == 0.0;
  if (action.coboundary_vector()) {
    m.mode = MaximalDomain::Mode::Coboundary;
    m.v = *action.coboundary_vector();
  } else if (!boundary_samples.empty()) {
    m.mode = MaximalDomain::Mode::Envelope;
    for (const auto& [y, g] : boundary_samples) {
      if (y.size() != cone.d()) throw ValidationError("maximal_domain: boundary sample has wrong dimension");
      if (cone.boundary_distance(y) > 1e-9 * (1.0 + y.norm()) || !(cone.gauge_star(y) >= 1.0 - 1e-9))
        throw ValidationError("maximal_domain: boundary sample is not on the boundary of Omega*");
    }
    m.boundary_data = boundary_samples;
    m.envelope = envelope_from_boundary(boundary_samples);
  } else if (trivial) {
    m.mode = MaximalDomain::Mode::Coboundary;
    m.v = Vec::Zero(dim);
  } else {
    throw ValidationError("maximal_domain: non-coboundary cocycle needs boundary samples of g_tau");
  }
  m.s_tau = sample_omega_star(cone, n_per_axis, [&](const Vec& y) { return m.value(y); });
  m.s_tau.convex = true;
  return m;
}

double g_tau_at_eigendirection(const GroupElement& g, const Vec& Y, double mu) {
  if (Y.size() != g.lin.rows()) throw ValidationError("g_tau: covector has wrong dimension");
  const Vec gY = g.lin.transpose() * Y;
  if ((gY - mu * Y).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, Y.cwiseAbs().maxCoeff()))
    throw ValidationError("g_tau: Y is not an eigencovector with the given eigenvalue");
  if (std::abs(1.0 - mu) < 1e-12) throw ValidationError("g_tau: eigenvalue 1 leaves the value undetermined");
  const int d = static_cast<int>(Y.size()) - 1;
  if (!(Y(d) < 0.0)) throw ValidationError("g_tau: covector must have negative last coordinate");
  // Total support is 1-homogeneous; rescale to the chart Y = (y, -1).
  return g.tau.dot(Y) / (1.0 - mu) / (-Y(d));
}

FundamentalDomain::FundamentalDomain(const ConeModel& cone, const GroupAction& action, int n, int radius)
    : cone_(cone), action_(action), n_(n), radius_(radius) {
  if (cone.kind() != ConeKind::Simplicial) throw ValidationError("fundamental domain: simplicial cone required");
  const int d = cone.d();
  if (d > 3) throw ValidationError("fundamental domain: d must be at most 3");
  if (n < 2 * radius + 1) throw ValidationError("fundamental domain: grid too small for the stencil");
  if (static_cast<int>(action.generators().size()) != d)
    throw ValidationError("fundamental domain: need exactly d lattice generators");
  const Mat& R = cone.rays();
  const Mat Rinv = R.inverse();
  T_.resize(d, d);
  for (int k = 0; k < d; ++k) {
    const Mat D = Rinv * action.generators()[k].lin * R;
    Mat off = D;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 1e-9 * D.cwiseAbs().maxCoeff())
      throw ValidationError("fundamental domain: generators must be diagonal in the ray basis");
    for (int j = 1; j <= d; ++j) T_(j - 1, k) = std::log(D(0, 0)) - std::log(D(j, j));
  }
  if (std::abs(T_.determinant()) < 1e-9) throw ValidationError("fundamental domain: generators do not span a lattice");
  sphere_ = std::make_shared<ClosedFormSphere>(cone);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  ys_.resize(total);
  omega_.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    ys_[i] = y_of_xi(xi(i));
    omega_[i] = sphere_->value(ys_[i]);
  }
  stencil_.resize(total);
  const int w = 2 * radius + 1;
  int boxes = 1;
  for (int a = 0; a < d; ++a) boxes *= w;
  for (std::size_t i = 0; i < total; ++i) {
    std::array<int, 3> mi{0, 0, 0};
    std::size_t r = i;
    for (int a = 0; a < d; ++a) {
      mi[a] = static_cast<int>(r % n);
      r /= n;
    }
    for (int c = 0; c < boxes; ++c) {
      std::array<int, 3> o{0, 0, 0};
      int rc = c;
      bool zero = true;
      for (int a = 0; a < d; ++a) {
        o[a] = rc % w - radius;
        rc /= w;
        zero = zero && o[a] == 0;
      }
      if (zero) continue;
      Neighbour nb;
      nb.wrap = {0, 0, 0};
      std::size_t idx = 0, stride = 1;
      Vec th = theta(i);
      for (int a = 0; a < d; ++a) {
        int m = mi[a] + o[a];
        int wr = (m >= 0) ? m / n : -((-m + n - 1) / n);
        m -= wr * n;
        nb.wrap[a] = wr;
        idx += static_cast<std::size_t>(m) * stride;
        stride *= n;
        th(a) += static_cast<double>(o[a]) / n;
      }
      nb.node = idx;
      nb.y = y_of_xi(T_ * th);
      nb.omega = sphere_->value(nb.y);
      stencil_[i].push_back(std::move(nb));
    }
  }
}

Vec FundamentalDomain::theta(std::size_t i) const {
  const int d = cone_.d();
  Vec th(d);
  for (int a = 0; a < d; ++a) {
    th(a) = (static_cast<double>(i % n_) + 0.5) / n_ - 0.5;
    i /= n_;
  }
  return th;
}

Vec FundamentalDomain::xi_of_y(const Vec& y) const {
  const Vec l = cone_.dual_forms(y);
  if ((l.array() <= 0.0).any()) throw ValidationError("fundamental domain: point outside Omega*");
  Vec xi(cone_.d());
  for (int j = 1; j <= cone_.d(); ++j) xi(j - 1) = std::log(l(j)) - std::log(l(0));
  return xi;
}

Vec FundamentalDomain::y_of_xi(const Vec& xi) const {
  const int d = cone_.d();
  const Mat& A = cone_.vertices();
  Mat B(d, d);
  Vec c(d);
  for (int j = 1; j <= d; ++j) {
    const double e = std::exp(xi(j - 1));
    B.row(j - 1) = (A.col(j) - e * A.col(0)).transpose();
    c(j - 1) = 1.0 - e;
  }
  return B.partialPivLu().solve(c);
}

Mat FundamentalDomain::jacobian(const Vec& xi) const {
  const int d = cone_.d();
  const Mat& A = cone_.vertices();
  const Vec y = y_of_xi(xi);
  const Vec l = cone_.dual_forms(y);
  Mat B(d, d);
  for (int j = 1; j <= d; ++j) B.row(j - 1) = (A.col(j) - std::exp(xi(j - 1)) * A.col(0)).transpose();
  Vec diag(d);
  for (int j = 1; j <= d; ++j) diag(j - 1) = l(j);
  return -B.inverse() * diag.asDiagonal();
}

double FundamentalDomain::cell_area_xi() const { return std::abs(T_.determinant()) / std::pow(n_, cone_.d()); }

double FundamentalDomain::sigma_density_xi() const {
  const Vec z = Vec::Zero(cone_.d());
  const double w = -sphere_->value(y_of_xi(z));
  return std::pow(w, -(cone_.d() + 1.0)) * std::abs(jacobian(z).determinant());
}

double FundamentalDomain::sigma_volume() const { return sigma_density_xi() * std::abs(T_.determinant()); }

GroupElement FundamentalDomain::lattice_element(const std::array<int, 3>& m) const {
  GroupElement g = identity_element(cone_.dim());
  for (int k = 0; k < cone_.d(); ++k) {
    const GroupElement& gen = action_.generators()[k];
    const GroupElement step = m[k] >= 0 ? gen : inverse(gen);
    for (int r = 0; r < std::abs(m[k]); ++r) g = compose(g, step);
  }
  return g;
}

std::size_t FundamentalDomain::locate(const Vec& xi, std::array<int, 3>& wrap) const {
  const Vec th = T_.partialPivLu().solve(xi);
  std::size_t idx = 0, stride = 1;
  wrap = {0, 0, 0};
  for (int a = 0; a < cone_.d(); ++a) {
    const long k = static_cast<long>(std::floor((th(a) + 0.5) * n_));
    const long wr = (k >= 0) ? k / n_ : -((-k + n_ - 1) / n_);
    wrap[a] = static_cast<int>(wr);
    idx += static_cast<std::size_t>(k - wr * n_) * stride;
    stride *= n_;
  }
  return idx;
}

double TauBody::support_at(std::size_t node) const {
  return dmax->value(dom->y(node)) + h[node] * dom->omega(node);
}

double TauBody::support_at(const FundamentalDomain::Neighbour& nb) const {
  return dmax->value(nb.y) + h[nb.node] * nb.omega;
}

TauBody make_tau_body(std::shared_ptr<const FundamentalDomain> dom, std::shared_ptr<const MaximalDomain> dmax,
                      std::vector<double> h) {
  if (!dom || !dmax) throw ValidationError("tau body: missing domain data");
  if (h.size() != dom->size()) throw ValidationError("tau body: wrong number of values");
  for (double v : h) {
    if (!std::isfinite(v)) throw ValidationError("tau body: non-finite value");
    if (v < -1e-12) throw ValidationError("tau body: support exceeds s_tau (K is not inside D_tau)");
  }
  return TauBody{std::move(dom), std::move(dmax), std::move(h)};
}

TauBody sigma_offset(std::shared_ptr<const FundamentalDomain> dom, std::shared_ptr<const MaximalDomain> dmax,
                     double t) {
  const std::size_t n = dom->size();
  return make_tau_body(std::move(dom), std::move(dmax), std::vector<double>(n, t));
}

namespace {

struct CellGeometry {
  Polytope poly;
  std::vector<double> coef;  // d area / d b_k per stencil entry
  bool open = false;
};

CellGeometry subgradient_polygon(const TauBody& body, std::size_t j) {
  const FundamentalDomain& dom = *body.dom;
  const auto& st = dom.stencil(j);
  const Vec& yj = dom.y(j);
  const double sj = body.support_at(j);
  const int d = dom.d();
  std::vector<Vec> e(st.size());
  std::vector<double> b(st.size());
  double slope_scale = 1.0;
  for (std::size_t k = 0; k < st.size(); ++k) {
    e[k] = st[k].y - yj;
    b[k] = body.support_at(st[k]) - sj;
    slope_scale = std::max(slope_scale, std::abs(b[k]) / e[k].norm());
  }
  const Vec g = body.dmax->gradient(yj);
  const double B = 1e3 * slope_scale;
  CellGeometry out;
  out.poly = clip_halfspaces(box_polytope(g - Vec::Constant(d, B), g + Vec::Constant(d, B)), e, b, {});
  out.coef.assign(st.size(), 0.0);
  if (out.poly.empty()) return out;
  const std::size_t m = out.poly.vertices.size();
  for (std::size_t i = 0; i < m; ++i) {
    const int tag = out.poly.edge_tags[i];
    double len = 1.0;
    if (d == 2) len = (out.poly.vertices[(i + 1) % m] - out.poly.vertices[i]).norm();
    if (tag < 0) {
      if (len > 0.0) out.open = true;
      continue;
    }
    out.coef[tag] += len / e[tag].norm();
  }
  return out;
}

}  // namespace

TorusArea torus_area(const TauBody& body, bool with_jacobian, Exec exec) {
  const FundamentalDomain& dom = *body.dom;
  const std::size_t N = dom.size();
  TorusArea out;
  out.mass.assign(N, 0.0);
  if (with_jacobian) out.jac.assign(N, {});
  std::vector<std::uint8_t> open(N, 0);
  const long long NN = static_cast<long long>(N);
  auto kernel = [&](long long jj) {
    const std::size_t j = static_cast<std::size_t>(jj);
    const CellGeometry cg = subgradient_polygon(body, j);
    const double wj = -dom.omega(j);
    out.mass[j] = wj * cg.poly.volume();
    open[j] = cg.open ? 1 : 0;
    if (!with_jacobian) return;
    const auto& st = dom.stencil(j);
    std::vector<std::pair<std::size_t, double>> row;
    double self = 0.0;
    for (std::size_t k = 0; k < st.size(); ++k) {
      if (cg.coef[k] == 0.0) continue;
      const double c = wj * cg.coef[k];
      row.emplace_back(st[k].node, c * st[k].omega);
      self -= c * dom.omega(j);
    }
    row.emplace_back(j, self);
    std::sort(row.begin(), row.end());
    std::vector<std::pair<std::size_t, double>> merged;
    for (const auto& e : row) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(e);
    }
    out.jac[j] = std::move(merged);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < NN; ++j) kernel(j);
  } else {
    for (long long j = 0; j < NN; ++j) kernel(j);
  }
  for (auto o : open) out.open_cells += o;
  return out;
}

namespace {

bool stencil_feasible(const std::vector<Vec>& e, const std::vector<double>& sk, double sj, const Vec& centre,
                      double B) {
  std::vector<double> b(sk.size());
  for (std::size_t k = 0; k < sk.size(); ++k) b[k] = sk[k] - sj;
  const int d = static_cast<int>(centre.size());
  return !clip_halfspaces(box_polytope(centre - Vec::Constant(d, B), centre + Vec::Constant(d, B)), e, b, {})
              .empty();
}

// Largest node value keeping the stencil subgradient cell nonempty: the lower
// convex envelope of the stencil data at the node (by Farkas' lemma).
double local_hull_value(const TauBody& body, std::size_t j) {
  const FundamentalDomain& dom = *body.dom;
  const auto& st = dom.stencil(j);
  const Vec& y = dom.y(j);
  std::vector<Vec> e(st.size());
  std::vector<double> sk(st.size());
  double slope_scale = 1.0, smin = std::numeric_limits<double>::infinity();
  const double sj = body.support_at(j);
  for (std::size_t k = 0; k < st.size(); ++k) {
    e[k] = st[k].y - y;
    sk[k] = body.support_at(st[k]);
    smin = std::min(smin, sk[k]);
    slope_scale = std::max(slope_scale, std::abs(sk[k] - sj) / e[k].norm());
  }
  const Vec centre = body.dmax->gradient(y);
  const double B = 1e3 * slope_scale;
  double hi = sj;
  if (stencil_feasible(e, sk, hi, centre, B)) return hi;
  double lo = smin, step = std::max(1e-12, std::abs(sj - smin));
  while (!stencil_feasible(e, sk, lo, centre, B)) {
    lo -= step;
    step *= 2.0;
    if (!std::isfinite(lo)) return lo;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (stencil_feasible(e, sk, mid, centre, B))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

std::size_t restore_convexity(TauBody& body, int sweeps) {
  const FundamentalDomain& dom = *body.dom;
  std::size_t changed = 0;
  for (int s = 0; s < sweeps; ++s) {
    std::size_t pass = 0;
    for (std::size_t j = 0; j < dom.size(); ++j) {
      if (!subgradient_polygon(body, j).poly.empty()) continue;
      const double hull = local_hull_value(body, j);
      if (!std::isfinite(hull)) continue;
      body.h[j] = (hull - body.dmax->value(dom.y(j))) / dom.omega(j);
      ++pass;
    }
    changed += pass;
    if (pass == 0) break;
  }
  return changed;
}

bool is_locally_convex(const TauBody& body, double tol) {
  for (std::size_t j = 0; j < body.dom->size(); ++j) {
    if (subgradient_polygon(body, j).poly.empty()) {
      const double hull = local_hull_value(body, j);
      if (body.support_at(j) - hull > tol * (1.0 + std::abs(hull))) return false;
    }
  }
  return true;
}

EquivarianceReport equivariance_residual(const GridFn& s, const GroupAction& action, const ConeModel& cone,
                                         const ScalarField& omega, std::size_t samples, std::uint64_t seed) {
  EquivarianceReport rep;
  const auto& cache = action.cached();
  if (cache.size() < 2 || samples == 0) return rep;
  const int d = cone.d();
  const double margin = 2.0 * s.spec.hmax();
  std::size_t attempts = 0;
  while (rep.samples < samples && attempts < 50 * samples) {
    const std::uint64_t k = attempts++;
    const GroupElement& g = cache[1 + (k % (cache.size() - 1))];
    Vec y(d);
    for (int a = 0; a < d; ++a)
      y(a) = s.spec.lo(a) + (s.spec.hi(a) - s.spec.lo(a)) * counter_uniform(seed, static_cast<std::uint64_t>(a), k);
    if (!cone.inside_omega_star(y) || cone.boundary_distance(y) < margin) {
      ++rep.skipped;
      continue;
    }
    const Vec z = dual_projective_action(cone, g.lin.inverse(), y);
    double sy, sz, ey, ez;
    if (cone.boundary_distance(z) < margin || !s.bilinear(y, sy, &ey) || !s.bilinear(z, sz, &ez)) {
      ++rep.skipped;
      continue;
    }
    Vec Y(d + 1);
    Y.head(d) = y;
    Y(d) = -1.0;
    const double ratio = omega.value(y) / omega.value(z);
    const double defect = std::abs(sy - ratio * sz - g.tau.dot(Y));
    const double bound = ey + std::abs(ratio) * ez;
    rep.max_defect = std::max(rep.max_defect, defect);
    rep.max_interp_bound = std::max(rep.max_interp_bound, bound);
    rep.max_excess = std::max(rep.max_excess, defect - bound);
    ++rep.samples;
  }
  return rep;
}

double hausdorff_distance(const TauBody& a, const TauBody& b) {
  if (a.dom != b.dom || a.h.size() != b.h.size()) throw ValidationError("hausdorff_distance: bodies on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.h.size(); ++i) m = std::max(m, std::abs(a.h[i] - b.h[i]));
  return m;
}

CosmologicalExtremes cosmological_extremes(const TauBody& b) {
  CosmologicalExtremes c{std::numeric_limits<double>::infinity(), 0.0};
  for (double v : b.h) {
    if (v < -1e-12) throw ValidationError("cosmological_extremes: K is not inside D_tau");
    c.t_min = std::min(c.t_min, v);
    c.t_max = std::max(c.t_max, v);
  }
  c.t_min = std::max(c.t_min, 0.0);
  return c;
}

double quotient_mass(const std::vector<double>& mass, const std::vector<std::size_t>& cells) {
  std::vector<double> parts;
  for (std::size_t i : cells) {
    if (i >= mass.size()) throw ValidationError("quotient_mass: cell outside the fundamental domain");
    parts.push_back(mass[i]);
  }
  return pairwise_sum(parts);
}

double area_of_image(const DiscreteMeasure& area, const ConeModel& cone, const Mat& g, const CellSet& b,
                     int subdivisions) {
  const GridSpec& s = area.spec;
  const int d = s.d;
  std::vector<std::uint8_t> in_b(s.size(), 0);
  Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  const Mat ginv = g.inverse();
  for (std::size_t i : b) {
    in_b[i] = 1;
    const Vec p = dual_projective_action(cone, g, s.node(i));
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::vector<double> parts;
  for (std::size_t c = 0; c < s.size(); ++c) {
    const Vec y = s.node(c);
    bool near = true;
    for (int a = 0; a < d; ++a) near = near && y(a) >= lo(a) - 3 * s.h(a) && y(a) <= hi(a) + 3 * s.h(a);
    if (!near) continue;
    int inside = 0, total = 0;
    std::array<int, 3> sub{0, 0, 0};
    int count = 1;
    for (int a = 0; a < d; ++a) count *= subdivisions;
    for (int q = 0; q < count; ++q) {
      int r = q;
      Vec p = y;
      for (int a = 0; a < d; ++a) {
        sub[a] = r % subdivisions;
        r /= subdivisions;
        p(a) += ((sub[a] + 0.5) / subdivisions - 0.5) * s.h(a);
      }
      ++total;
      if (!cone.inside_omega_star(p)) continue;
      const Vec z = dual_projective_action(cone, ginv, p);
      std::array<int, 3> m{0, 0, 0};
      bool ok = true;
      for (int a = 0; a < d; ++a) {
        const long idx = std::lround((z(a) - s.lo(a)) / s.h(a));
        if (idx < 0 || idx >= s.n[a]) ok = false;
        else m[a] = static_cast<int>(idx);
      }
      if (ok && in_b[s.flat(m)]) ++inside;
    }
    if (inside == 0) continue;
    if (!area.defined[c]) throw ValidationError("area_of_image: image reaches cells without a measure");
    parts.push_back(area.mass[c] * inside / total);
  }
  return pairwise_sum(parts);
}

bool dirichlet_lee_member(const Vec& P, const Vec& y0, const GroupAction& action, const MaximalDomain& dmax,
                          const ConeModel& cone, double tol) {
  if (!dmax.contains(cone, P)) throw ValidationError("dirichlet_lee_member: point outside D_tau");
  const int d = cone.d();
  Vec Y(d + 1);
  Y.head(d) = y0;
  Y(d) = -1.0;
  const double base = P.dot(Y);
  for (const auto& g : action.cached())
    if ((g.lin * P + g.tau).dot(Y) > base + tol) return false;
  return true;
}

CoveringReport dirichlet_lee_covering(const FundamentalDomain& dom, const MaximalDomain& dmax, const Vec& y0,
                                      std::size_t samples, double t_lo, double t_hi, std::uint64_t seed) {
  if (dmax.mode != MaximalDomain::Mode::Coboundary) throw ValidationError("covering: coboundary instances only");
  if (!(t_hi > t_lo && t_lo > 0.0)) throw ValidationError("covering: need 0 < t_lo < t_hi");
  const int d = dom.d();
  const auto& cache = dom.action().cached();
  Vec Y(d + 1);
  Y.head(d) = y0;
  Y(d) = -1.0;
  CoveringReport rep;
  rep.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    Vec th(d);
    for (int a = 0; a < d; ++a) th(a) = counter_uniform(seed, static_cast<std::uint64_t>(a), k) - 0.5;
    const double t = t_lo + (t_hi - t_lo) * counter_uniform(seed, static_cast<std::uint64_t>(d), k);
    const Vec y = dom.y_of_xi(dom.translations() * th);
    const Vec P = dmax.v + t * c_normal(dom.sphere(), y);
    // Candidate translate: the cached image with the largest height along Y.
    std::size_t best = 0;
    double hbest = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cache.size(); ++c) {
      const double hgt = (cache[c].lin * P + cache[c].tau).dot(Y);
      if (hgt > hbest) {
        hbest = hgt;
        best = c;
      }
    }
    const Vec Q = cache[best].lin * P + cache[best].tau;
    const double tol = 1e-10 * (1.0 + Q.norm());
    if (dirichlet_lee_member(Q, y0, dom.action(), dmax, dom.cone(), tol)) {
      ++rep.covered;
    } else {
      ++rep.uncovered;
      if (rep.failures.size() < 10) rep.failures.push_back(P);
    }
  }
  return rep;
}

}  // namespace conevex
