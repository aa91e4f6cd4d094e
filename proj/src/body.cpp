#include "conevex/body.hpp"

#include "conevex/convex.hpp"
#include "conevex/quadrature.hpp"
#include "conevex/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conevex {

DiscreteMeasure::DiscreteMeasure(GridSpec s) : spec(std::move(s)) {
  mass.assign(spec.size(), 0.0);
  atom.assign(spec.size(), 0);
  defined.assign(spec.size(), 0);
}

double DiscreteMeasure::total() const { return pairwise_sum(mass); }

double DiscreteMeasure::total(const CellSet& cells) const {
  std::vector<double> parts;
  parts.reserve(cells.size());
  for (std::size_t i : cells) {
    if (i >= mass.size()) throw ValidationError("measure: cell index out of range");
    parts.push_back(mass[i]);
  }
  return pairwise_sum(parts);
}

std::vector<Atom> DiscreteMeasure::atoms() const {
  std::vector<Atom> out;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (atom[i]) out.push_back({i, spec.node(i), mass[i]});
  return out;
}

DiscreteMeasure DiscreteMeasure::restricted(const CellSet& cells) const {
  DiscreteMeasure m(spec);
  for (std::size_t i : cells) {
    if (i >= mass.size()) throw ValidationError("measure: cell index out of range");
    m.mass[i] = mass[i];
    m.atom[i] = atom[i];
    m.defined[i] = defined[i];
  }
  return m;
}

double OffsetSupport::value(const Vec& y) const {
  const int d = static_cast<int>(y.size());
  return v_.head(d).dot(y) - v_(d) + (t_ != 0.0 ? t_ * omega_->value(y) : 0.0);
}

Vec OffsetSupport::gradient(const Vec& y) const {
  const int d = static_cast<int>(y.size());
  Vec g = v_.head(d);
  if (t_ != 0.0) g += t_ * omega_->gradient(y);
  return g;
}

Mat OffsetSupport::hessian(const Vec& y) const {
  const int d = static_cast<int>(y.size());
  if (t_ == 0.0) return Mat::Zero(d, d);
  return t_ * omega_->hessian(y);
}

Body make_body(GridFn support, std::shared_ptr<const AffineSphere> sphere, std::shared_ptr<const ScalarField> field) {
  if (!sphere) throw ValidationError("body: missing affine sphere");
  if (!support.spec.same_as(sphere->omega.spec)) throw ValidationError("body: support grid differs from the sphere grid");
  if (support.mask != sphere->omega.mask) throw ValidationError("body: support mask differs from the sphere mask");
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support.masked(i) && !std::isfinite(support.values[i])) throw ValidationError("body: non-finite support value");
  if (!check_discrete_convexity(support)) throw ValidationError("body: support function is not convex");
  support.convex = true;
  Body b{std::move(support), std::move(sphere), std::move(field), true};
  for (std::size_t i : masked_cells(b.support, 2)) {
    Mat H;
    if (!hessian_fd(b.support, i, H) || H.llt().info() != Eigen::Success) {
      b.c2plus = false;
      break;
    }
  }
  return b;
}

Body offset_body(std::shared_ptr<const AffineSphere> sphere, const Vec& v, double t) {
  if (v.size() != sphere->cone.dim()) throw ValidationError("offset body: translation has wrong dimension");
  if (t < 0.0) throw ValidationError("offset body: t must be nonnegative");
  auto field = std::make_shared<OffsetSupport>(v, t, sphere->field);
  GridFn s = sphere->omega;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.masked(i)) s.values[i] = v.head(s.spec.d).dot(s.spec.node(i)) - v(s.spec.d) + t * sphere->omega.values[i];
  return make_body(std::move(s), sphere, field);
}

Body add_sigma(const Body& body, double t) {
  if (t < 0.0) throw ValidationError("add_sigma: t must be nonnegative");
  GridFn s = body.support;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.masked(i)) s.values[i] += t * body.sphere->omega.values[i];
  std::shared_ptr<const ScalarField> field;
  if (auto off = std::dynamic_pointer_cast<const OffsetSupport>(body.field))
    field = std::make_shared<OffsetSupport>(off->v(), off->t() + t, body.sphere->field);
  return make_body(std::move(s), body.sphere, field);
}

DiscreteMeasure ma_measure(const GridFn& s, Exec exec) {
  if (!s.convex) throw ValidationError("ma_measure: convexity flag not set");
  DiscreteMeasure m(s.spec);
  const double h = s.spec.hmax();
  const long long N = static_cast<long long>(s.size());
  auto kernel = [&](long long k) {
    const std::size_t i = static_cast<std::size_t>(k);
    if (!s.masked(i) || !s.interior(i, 2)) return;
    const Polytope P = subgradient_cell(s, i, 2);
    m.defined[i] = 1;
    m.mass[i] = P.volume();
    // Degenerate (lower-dimensional) cells carry rounding-level area only.
    const double diam = P.diameter();
    m.atom[i] = (diam > 3.0 * h && m.mass[i] > 1e-10 * std::pow(diam, s.spec.d)) ? 1 : 0;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long long k = 0; k < N; ++k) kernel(k);
  } else {
    for (long long k = 0; k < N; ++k) kernel(k);
  }
  return m;
}

DiscreteMeasure area_measure(const Body& body, Exec exec) {
  DiscreteMeasure m = ma_measure(body.support, exec);
  for (std::size_t i = 0; i < m.mass.size(); ++i)
    if (m.defined[i]) m.mass[i] *= -body.sphere->omega.values[i];
  return m;
}

CellSet measurable_cells(const Body& body) {
  const GridSpec& s = body.support.spec;
  double half_diag = 0.0;
  for (int a = 0; a < s.d; ++a) half_diag += 0.25 * s.h(a) * s.h(a);
  half_diag = std::sqrt(half_diag);
  CellSet out;
  for (std::size_t i : masked_cells(body.support, 2))
    if (body.cone().boundary_distance(s.node(i)) > half_diag) out.push_back(i);
  return out;
}

DiscreteMeasure parallel_volume(const Body& body, double eps, Exec exec) {
  if (!(eps > 0.0)) throw ValidationError("parallel_volume: eps must be positive");
  const CellSet cells = measurable_cells(body);
  DiscreteMeasure m(body.support.spec);
  const int d = body.support.spec.d;
  std::vector<double> gx, gw;
  gauss_legendre01(d / 2 + 2, gx, gw);
  const double vol = body.support.spec.cell_volume();
  const long long n = static_cast<long long>(cells.size());
  auto kernel = [&](long long k) {
    const std::size_t i = cells[static_cast<std::size_t>(k)];
    Mat Hs;
    hessian_fd(body.support, i, Hs);
    const Mat& Hw = body.sphere->hess[i];
    double integral = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) integral += gw[q] * (Hs + eps * gx[q] * Hw).determinant();
    m.mass[i] = vol * (-body.sphere->omega.values[i]) * eps * integral;
    m.defined[i] = 1;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < n; ++k) kernel(k);
  } else {
    for (long long k = 0; k < n; ++k) kernel(k);
  }
  return m;
}

double parallel_volume(const Body& body, double eps, const CellSet& b) {
  const DiscreteMeasure m = parallel_volume(body, eps);
  for (std::size_t i : b)
    if (i >= m.defined.size() || !m.defined[i]) throw ValidationError("parallel_volume: cell set reaches the boundary");
  return m.total(b);
}

bool conjugate_point(const ConeModel& cone, const ScalarField& s, const ScalarField& omega, double t, const Vec& x,
                     Vec& y, double& value) {
  auto phi = [&](const Vec& z) { return x.dot(z) - s.value(z) - t * omega.value(z); };
  if (!cone.inside_omega_star(y)) y = Vec::Zero(x.size());
  double f = phi(y);
  for (int it = 0; it < 200; ++it) {
    const Vec g = x - s.gradient(y) - t * omega.gradient(y);
    const Mat H = s.hessian(y) + t * omega.hessian(y);
    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success) return false;
    const Vec step = llt.solve(g);
    const double decrement = g.dot(step);
    if (decrement < 1e-24 * (1.0 + std::abs(f))) {
      value = f;
      return true;
    }
    double a = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, a *= 0.5) {
      const Vec z = y + a * step;
      if (!cone.inside_omega_star(z) || cone.boundary_distance(z) <= 0.0) continue;
      const double fz = phi(z);
      if (fz >= f + 0.25 * a * decrement || (a * step).norm() < 1e-15) {
        y = z;
        f = fz;
        moved = true;
        break;
      }
    }
    if (!moved) {
      value = f;
      return decrement < 1e-16 * (1.0 + std::abs(f));
    }
  }
  value = f;
  return false;
}

McEstimate parallel_volume_mc(const Body& body, double eps, const CellSet& b, std::size_t samples,
                              std::uint64_t seed, Exec exec) {
  if (!(eps > 0.0)) throw ValidationError("parallel_volume_mc: eps must be positive");
  if (!body.field) throw ValidationError("parallel_volume_mc: body has no exact support field");
  if (b.empty()) return {};
  const GridSpec& spec = body.support.spec;
  const int d = spec.d;
  const ScalarField& s = *body.field;
  const ScalarField& om = *body.sphere->field;
  const ConeModel& cone = body.cone();
  std::vector<std::uint8_t> in_b(spec.size(), 0);
  for (std::size_t i : b) {
    if (i >= spec.size() || !body.support.masked(i)) throw ValidationError("parallel_volume_mc: invalid cell");
    in_b[i] = 1;
  }
  // Bounding box of the swept region {G_s(y) + t N(y)} over cell corners and t in {0, eps}.
  Vec lo = Vec::Constant(d + 1, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  const int corners = 1 << d;
  for (std::size_t i : b) {
    const Vec c = spec.node(i);
    for (int k = 0; k <= corners; ++k) {
      Vec y = c;
      if (k < corners)
        for (int a = 0; a < d; ++a) y(a) += (((k >> a) & 1) ? 0.5 : -0.5) * spec.h(a);
      if (!cone.inside_omega_star(y)) throw ValidationError("parallel_volume_mc: cell set reaches the boundary");
      const Vec gs = s.gradient(y);
      Vec X(d + 1);
      X.head(d) = gs;
      X(d) = gs.dot(y) - s.value(y);
      const Vec N = c_normal(om, y);
      for (double t : {0.0, eps}) {
        const Vec P = X + t * N;
        lo = lo.cwiseMin(P);
        hi = hi.cwiseMax(P);
      }
    }
  }
  const Vec pad = 0.05 * (hi - lo) + Vec::Constant(d + 1, 1e-9);
  lo -= pad;
  hi += pad;
  const double box = (hi - lo).prod();
  const double tmin = 1e-4 * eps;  // retraction times below this are counted as misses

  std::vector<std::uint8_t> hit(samples, 0), fail(samples, 0);
  const long long n = static_cast<long long>(samples);
  auto kernel = [&](long long k) {
    Vec X(d + 1);
    for (int a = 0; a <= d; ++a)
      X(a) = lo(a) + (hi(a) - lo(a)) * counter_uniform(seed, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(k));
    const Vec x = X.head(d);
    const double lambda = X(d);
    Vec y = Vec::Zero(d);
    double fe;
    if (!conjugate_point(cone, s, om, eps, x, y, fe)) {
      fail[k] = 1;
      return;
    }
    if (lambda > fe) return;  // inside K + eps Sigma
    Vec ylo = y;
    double flo;
    if (!conjugate_point(cone, s, om, tmin, x, ylo, flo)) {
      fail[k] = 1;
      return;
    }
    if (lambda <= flo) return;  // outside K, or retraction time below tmin
    double tl = tmin, th = eps;
    Vec yh = y;
    while (th - tl > 1e-10) {
      const double tm = 0.5 * (tl + th);
      Vec ym = yh;
      double fm;
      if (!conjugate_point(cone, s, om, tm, x, ym, fm)) {
        fail[k] = 1;
        return;
      }
      if (fm >= lambda) {
        th = tm;
        yh = ym;
      } else {
        tl = tm;
      }
    }
    // Foot of the retraction: nearest node cell.
    std::array<int, 3> m{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const int idx = static_cast<int>(std::lround((yh(a) - spec.lo(a)) / spec.h(a)));
      if (idx < 0 || idx >= spec.n[a]) return;
      m[a] = idx;
    }
    if (in_b[spec.flat(m)]) hit[k] = 1;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (long long k = 0; k < n; ++k) kernel(k);
  } else {
    for (long long k = 0; k < n; ++k) kernel(k);
  }
  McEstimate r;
  r.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    r.hits += hit[k];
    r.failures += fail[k];
  }
  const double p = static_cast<double>(r.hits) / static_cast<double>(samples);
  r.value = box * p;
  r.stderr_ = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return r;
}

double SteinerCoeffs::predict(double e, const CellSet& cells) const {
  double v = 0.0;
  for (int i = 0; i <= d; ++i) {
    double binom = 1.0;
    for (int k = 1; k <= i; ++k) binom = binom * (d + 2 - k) / k;
    v += std::pow(e, d + 1 - i) * binom * S[i].total(cells);
  }
  return v / (d + 1);
}

std::vector<double> default_steiner_nodes(int d) {
  std::vector<double> e;
  for (int k = 0; k <= d; ++k) e.push_back(0.2 * (k + 1));
  return e;
}

SteinerCoeffs steiner_fit(const std::vector<DiscreteMeasure>& volumes, const std::vector<double>& eps) {
  if (volumes.empty() || volumes.size() != eps.size()) throw ValidationError("steiner_fit: need one volume per node");
  const int d = volumes[0].spec.d;
  if (static_cast<int>(eps.size()) != d + 1) throw ValidationError("steiner_fit: need d+1 nodes");
  for (std::size_t a = 0; a < eps.size(); ++a) {
    if (!(eps[a] > 0.0)) throw ValidationError("steiner_fit: nodes must be positive");
    for (std::size_t b = a + 1; b < eps.size(); ++b)
      if (eps[a] == eps[b]) throw ValidationError("steiner_fit: nodes must be distinct");
  }
  Mat A(d + 1, d + 1);
  for (int k = 0; k <= d; ++k) {
    double binom = 1.0;
    for (int i = 0; i <= d; ++i) {
      if (i > 0) binom = binom * (d + 2 - i) / i;
      A(k, i) = std::pow(eps[k], d + 1 - i) * binom / (d + 1);
    }
  }
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec sv = svd.singularValues();
  SteinerCoeffs out;
  out.d = d;
  out.eps = eps;
  out.condition = sv(0) / sv(sv.size() - 1);
  if (!(out.condition <= 1e8)) throw ValidationError("steiner_fit: node set is ill-conditioned");
  const Mat Ainv = A.inverse();
  out.S.assign(d + 1, DiscreteMeasure(volumes[0].spec));
  for (std::size_t c = 0; c < volumes[0].mass.size(); ++c) {
    bool def = true;
    for (const auto& v : volumes) def = def && v.defined[c];
    if (!def) continue;
    for (int i = 0; i <= d; ++i) {
      double m = 0.0;
      for (int k = 0; k <= d; ++k) m += Ainv(i, k) * volumes[k].mass[c];
      out.S[i].mass[c] = m;
      out.S[i].defined[c] = 1;
    }
  }
  return out;
}

SteinerCoeffs steiner_fit(const Body& body, const std::vector<double>& eps, Exec exec) {
  std::vector<DiscreteMeasure> vols;
  for (double e : eps) vols.push_back(parallel_volume(body, e, exec));
  return steiner_fit(vols, eps);
}

GridFn c_curvature(const Body& body) {
  if (!body.c2plus) throw ValidationError("c_curvature: body lacks the C2-plus certificate");
  GridFn phi = body.support;
  std::fill(phi.values.begin(), phi.values.end(), 0.0);
  std::fill(phi.mask.begin(), phi.mask.end(), 0);
  phi.convex = false;
  const int d = phi.spec.d;
  for (std::size_t i : measurable_cells(body)) {
    Mat H;
    hessian_fd(body.support, i, H);
    const double det = H.determinant();
    if (!(det > 0.0)) throw ValidationError("c_curvature: singular discrete Hessian");
    phi.values[i] = std::pow(-body.sphere->omega.values[i], -(d + 2.0)) / det;
    phi.mask[i] = 1;
  }
  return phi;
}

Radii shape_operator_radii(const Body& body) {
  if (!body.c2plus) throw ValidationError("shape_operator_radii: body lacks the C2-plus certificate");
  const int d = body.support.spec.d;
  Radii out;
  const std::size_t N = body.support.size();
  out.curvatures.assign(N, Vec());
  out.radii.assign(N, Vec());
  out.sigma.assign(N, Vec());
  for (std::size_t i : measurable_cells(body)) {
    Mat Hs;
    hessian_fd(body.support, i, Hs);
    const Mat& Hw = body.sphere->hess[i];
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Hw, Hs);
    if (es.info() != Eigen::Success) throw ValidationError("shape_operator_radii: singular Hessian");
    const Vec k = es.eigenvalues();
    out.curvatures[i] = k;
    out.radii[i] = k.cwiseInverse();
    // Elementary symmetric polynomials of the radii, then divided by binomial(d, i).
    Vec e = Vec::Zero(d + 1);
    e(0) = 1.0;
    for (int j = 0; j < d; ++j)
      for (int m = j + 1; m >= 1; --m) e(m) += e(m - 1) * out.radii[i](j);
    double binom = 1.0;
    for (int m = 1; m <= d; ++m) {
      binom = binom * (d + 1 - m) / m;
      e(m) /= binom;
    }
    out.sigma[i] = e;
  }
  return out;
}

double curvature_conversion(double kappa, int d) {
  if (!(kappa > 0.0)) throw ValidationError("curvature_conversion: kappa must be positive");
  if (d < 1) throw ValidationError("curvature_conversion: d must be positive");
  return std::pow(kappa, 2.0 * (d + 1) / (d + 2));
}

}  // namespace conevex
