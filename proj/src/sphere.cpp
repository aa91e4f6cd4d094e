#include "conevex/sphere.hpp"

#include <Eigen/SparseLU>
#include <Eigen/Sparse>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace conevex {

namespace {

struct Term {
  int col;  // unknown index, or -1 for a boundary value (w = 0)
  double coef;
};
using LinOp = std::vector<Term>;

double apply(const LinOp& op, const std::vector<double>& w) {
  double s = 0.0;
  for (const auto& t : op)
    if (t.col >= 0) s += t.coef * w[t.col];
  return s;
}

Mat adjugate(const Mat& M) {
  const auto d = M.rows();
  Mat A(d, d);
  if (d == 1) {
    A(0, 0) = 1.0;
  } else if (d == 2) {
    A << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        A(j, i) = M(i1, j1) * M(i2, j2) - M(i1, j2) * M(i2, j1);
      }
  }
  return A;
}

// Non-uniform three-point stencil along a lattice direction, exact for quadratics.
struct Line {
  LinOp first;
  LinOp second;
};

struct NodeStencil {
  std::vector<LinOp> g;               // first derivatives along axes
  std::vector<std::vector<LinOp>> D;  // second derivatives
};

class Discretisation {
 public:
  Discretisation(const ConeModel& cone, const GridFn& shape) : cone_(cone), spec_(shape.spec) {
    const std::size_t N = spec_.size();
    col_.assign(N, -1);
    for (std::size_t i = 0; i < N; ++i)
      if (shape.masked(i)) {
        col_[i] = static_cast<int>(nodes_.size());
        nodes_.push_back(i);
      }
    const int d = spec_.d;
    stencils_.resize(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      NodeStencil& st = stencils_[k];
      st.g.resize(d);
      st.D.assign(d, std::vector<LinOp>(d));
      std::vector<LinOp> second_axis(d);
      for (int a = 0; a < d; ++a) {
        std::array<int, 3> e{0, 0, 0};
        e[a] = 1;
        Line l = line(nodes_[k], e);
        st.g[a] = l.first;
        st.D[a][a] = l.second;
      }
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
          std::array<int, 3> ep{0, 0, 0}, em{0, 0, 0};
          ep[a] = ep[b] = 1;
          em[a] = 1;
          em[b] = -1;
          const double ha = spec_.h(a), hb = spec_.h(b);
          const double L2 = ha * ha + hb * hb;
          const double f = L2 / (4.0 * ha * hb);
          LinOp mixed;
          for (auto t : line(nodes_[k], ep).second) mixed.push_back({t.col, f * t.coef});
          for (auto t : line(nodes_[k], em).second) mixed.push_back({t.col, -f * t.coef});
          st.D[a][b] = mixed;
          st.D[b][a] = mixed;
        }
    }
  }

  std::size_t unknowns() const { return nodes_.size(); }
  std::size_t node(std::size_t k) const { return nodes_[k]; }
  const NodeStencil& stencil(std::size_t k) const { return stencils_[k]; }

 private:
  Line line(std::size_t i, const std::array<int, 3>& e) const {
    const int d = spec_.d;
    const Vec y = spec_.node(i);
    Vec step(d);
    for (int a = 0; a < d; ++a) step(a) = e[a] * spec_.h(a);
    const double L = step.norm();
    const Vec u = step / L;
    double hp, hm;
    int cp = side(i, e, u, L, y, hp);
    std::array<int, 3> me{-e[0], -e[1], -e[2]};
    int cm = side(i, me, -u, L, y, hm);
    const int c0 = col_[i];
    Line l;
    const double s = hp + hm;
    l.second = {{cp, 2.0 / (hp * s)}, {c0, -2.0 / (hp * hm)}, {cm, 2.0 / (hm * s)}};
    const double den = hp * hm * s;
    l.first = {{cp, hm * hm / den}, {c0, (hp * hp - hm * hm) / den}, {cm, -hp * hp / den}};
    return l;
  }

  int side(std::size_t i, const std::array<int, 3>& e, const Vec& u, double L, const Vec& y, double& dist) const {
    const double exit = cone_.ray_exit(y, u);
    std::size_t j;
    if (exit >= L * (1.0 - 1e-12) && spec_.offset(i, e, j) && col_[j] >= 0) {
      dist = L;
      return col_[j];
    }
    dist = std::min(exit, L);
    if (!(dist > 0.0)) throw ValidationError("affine sphere: node on the boundary");
    return -1;
  }

  const ConeModel& cone_;
  GridSpec spec_;
  std::vector<int> col_;
  std::vector<std::size_t> nodes_;
  std::vector<NodeStencil> stencils_;
};

struct Evaluated {
  Vec g;
  Mat D;
  Mat M;
};

Evaluated evaluate_node(const NodeStencil& st, const std::vector<double>& w, double wi, double q) {
  const int d = static_cast<int>(st.g.size());
  Evaluated ev{Vec(d), Mat(d, d), Mat(d, d)};
  for (int a = 0; a < d; ++a) ev.g(a) = apply(st.g[a], w);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) ev.D(a, b) = apply(st.D[a][b], w);
  ev.M = -wi * ev.D + (1.0 - q) * ev.g * ev.g.transpose();
  return ev;
}

}  // namespace

double ClosedFormSphere::value(const Vec& y) const {
  if (!cone_.inside_omega_star(y)) throw ValidationError("affine sphere: point outside Omega*");
  if (cone_.kind() == ConeKind::Quadratic) return -std::sqrt(1.0 - y.squaredNorm());
  const Vec l = cone_.dual_forms(y);
  const double beta = 1.0 / (cone_.d() + 1);
  return -cone_.simplicial_sphere_scale() * std::exp(beta * l.array().log().sum());
}

Vec ClosedFormSphere::gradient(const Vec& y) const {
  const double w = value(y);
  if (cone_.kind() == ConeKind::Quadratic) return y / (-w);
  const Vec l = cone_.dual_forms(y);
  const double beta = 1.0 / (cone_.d() + 1);
  Vec G = Vec::Zero(cone_.d());
  for (int i = 0; i <= cone_.d(); ++i) G -= beta * cone_.vertices().col(i) / l(i);
  return w * G;
}

Mat ClosedFormSphere::hessian(const Vec& y) const {
  const double w = value(y);
  const int d = cone_.d();
  if (cone_.kind() == ConeKind::Quadratic) {
    const double r = -w;
    return Mat::Identity(d, d) / r + y * y.transpose() / (r * r * r);
  }
  const Vec l = cone_.dual_forms(y);
  const double beta = 1.0 / (d + 1);
  Vec G = Vec::Zero(d);
  Mat dG = Mat::Zero(d, d);
  for (int i = 0; i <= d; ++i) {
    const Vec a = cone_.vertices().col(i);
    G -= beta * a / l(i);
    dG -= beta * a * a.transpose() / (l(i) * l(i));
  }
  return w * (G * G.transpose() + dG);
}

void InterpolatedSphere::eval(const Vec& y, double& w, Vec& g, Mat& H) const {
  const GridSpec& s = w_.spec;
  const int d = s.d;
  std::array<int, 3> base{0, 0, 0};
  std::array<std::array<double, 4>, 3> L{}, dL{}, ddL{};
  for (int a = 0; a < d; ++a) {
    const double t = (y(a) - s.lo(a)) / s.h(a);
    const int i = static_cast<int>(std::floor(t));
    if (i - 1 < 0 || i + 2 >= s.n[a]) throw ValidationError("sphere interpolation: point too close to the grid edge");
    base[a] = i - 1;
    const double x = t - (i - 1);  // local coordinate, nodes at 0,1,2,3
    for (int m = 0; m < 4; ++m) {
      // Lagrange basis on {0,1,2,3} and its first two derivatives.
      double v = 1.0, dv = 0.0, ddv = 0.0;
      double den = 1.0;
      std::array<double, 3> f{};
      int c = 0;
      for (int k = 0; k < 4; ++k)
        if (k != m) {
          f[c++] = x - k;
          den *= (m - k);
        }
      v = f[0] * f[1] * f[2];
      dv = f[1] * f[2] + f[0] * f[2] + f[0] * f[1];
      ddv = 2.0 * (f[0] + f[1] + f[2]);
      L[a][m] = v / den;
      dL[a][m] = dv / den / s.h(a);
      ddL[a][m] = ddv / den / (s.h(a) * s.h(a));
    }
  }
  w = 0.0;
  g = Vec::Zero(d);
  H = Mat::Zero(d, d);
  int total = 1;
  for (int a = 0; a < d; ++a) total *= 4;
  for (int c = 0; c < total; ++c) {
    std::array<int, 3> m{0, 0, 0}, loc{0, 0, 0};
    int r = c;
    for (int a = 0; a < d; ++a) {
      loc[a] = r % 4;
      r /= 4;
      m[a] = base[a] + loc[a];
    }
    const std::size_t j = s.flat(m);
    if (!w_.masked(j)) throw ValidationError("sphere interpolation: point too close to the boundary");
    const double v = w_.values[j];
    double prod = 1.0;
    for (int a = 0; a < d; ++a) prod *= L[a][loc[a]];
    w += prod * v;
    for (int a = 0; a < d; ++a) {
      double pa = dL[a][loc[a]];
      for (int b = 0; b < d; ++b)
        if (b != a) pa *= L[b][loc[b]];
      g(a) += pa * v;
      for (int b = a; b < d; ++b) {
        double pab = 1.0;
        for (int e = 0; e < d; ++e) {
          if (a == b && e == a) pab *= ddL[e][loc[e]];
          else if (e == a || e == b) pab *= dL[e][loc[e]];
          else pab *= L[e][loc[e]];
        }
        H(a, b) += pab * v;
        if (b != a) H(b, a) += pab * v;
      }
    }
  }
}

double InterpolatedSphere::value(const Vec& y) const {
  double w;
  Vec g;
  Mat H;
  eval(y, w, g, H);
  return -std::pow(std::max(w, 0.0), 1.0 / p_);
}

Vec InterpolatedSphere::gradient(const Vec& y) const {
  double w;
  Vec g;
  Mat H;
  eval(y, w, g, H);
  const double q = 1.0 / p_;
  return -q * std::pow(w, q - 1.0) * g;
}

Mat InterpolatedSphere::hessian(const Vec& y) const {
  double w;
  Vec g;
  Mat H;
  eval(y, w, g, H);
  const double q = 1.0 / p_;
  return q * std::pow(w, q - 2.0) * (-w * H + (1.0 - q) * g * g.transpose());
}

AffineSphere solve_affine_sphere(const ConeModel& cone, int n_per_axis, const SphereOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (n_per_axis < 33) throw ValidationError("affine sphere: need at least 33 nodes per axis");
  const int d = cone.d();
  const double p = cone.boundary_exponent();
  const double q = 1.0 / p;
  const double r = 2.0 * d - 2.0 * q * (d + 1);
  const double qd = std::pow(q, -d);

  GridFn shape = sample_omega_star(cone, n_per_axis, [](const Vec&) { return 0.0; });
  Discretisation disc(cone, shape);
  const std::size_t N = disc.unknowns();

  // Initial guess A * b(y) with b a concave defining function of Omega*:
  // 1 - |y|^2 on the ball, the harmonic mean of the facet forms on a simplex.
  // A is fixed by the equation at the centroid.
  auto defining = [&](const Vec& y) {
    if (cone.kind() == ConeKind::Quadratic) return 1.0 - y.squaredNorm();
    return 1.0 / cone.dual_forms(y).cwiseInverse().sum();
  };
  double amp = 1.0;
  {
    Vec c = Vec::Zero(d);
    if (cone.kind() == ConeKind::Simplicial) {
      for (const auto& v : cone.star_vertices()) c += v;
      c /= d + 1.0;
    }
    const double eps = 1e-4;
    const double b0 = defining(c);
    Vec g(d);
    Mat H(d, d);
    for (int a = 0; a < d; ++a) {
      Vec e = Vec::Zero(d);
      e(a) = eps;
      g(a) = (defining(c + e) - defining(c - e)) / (2 * eps);
      for (int b = 0; b < d; ++b) {
        Vec f = Vec::Zero(d);
        f(b) = eps;
        H(a, b) = (defining(c + e + f) - defining(c + e - f) - defining(c - e + f) + defining(c - e - f)) / (4 * eps * eps);
      }
    }
    const double m0 = (-b0 * H + (1.0 - q) * g * g.transpose()).determinant();
    amp = std::pow(qd * std::pow(b0, r) / m0, 1.0 / (2.0 * d - r));
  }
  std::vector<double> w(N);
  for (std::size_t k = 0; k < N; ++k)
    w[k] = opt.initial_scale * amp * defining(shape.spec.node(disc.node(k)));

  // Returns false when M leaves the positive-definite (elliptic) branch somewhere.
  auto residual_of = [&](const std::vector<double>& x, std::vector<double>& F) {
    F.resize(N);
    const long long NN = static_cast<long long>(N);
    int elliptic = 1;
#pragma omp parallel for schedule(static) reduction(min : elliptic) if (opt.exec == Exec::Parallel)
    for (long long k = 0; k < NN; ++k) {
      const Evaluated ev = evaluate_node(disc.stencil(k), x, x[k], q);
      F[k] = ev.M.determinant() - qd * std::pow(x[k], r);
      if (ev.M.llt().info() != Eigen::Success) elliptic = 0;
    }
    return elliptic == 1;
  };
  auto norm2 = [](const std::vector<double>& F) {
    std::vector<double> sq(F.size());
    for (std::size_t k = 0; k < F.size(); ++k) sq[k] = F[k] * F[k];
    return std::sqrt(pairwise_sum(sq));
  };

  SphereDiagnostics diag;
  std::vector<double> F;
  if (!residual_of(w, F)) throw ConvergenceError("affine sphere: initial guess is not elliptic");
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    std::vector<std::vector<Eigen::Triplet<double>>> rows(N);
    const long long NN = static_cast<long long>(N);
#pragma omp parallel for schedule(static) if (opt.exec == Exec::Parallel)
    for (long long k = 0; k < NN; ++k) {
      const NodeStencil& st = disc.stencil(k);
      const Evaluated ev = evaluate_node(st, w, w[k], q);
      const Mat A = adjugate(ev.M);
      auto& row = rows[k];
      double centre_coef = -r * qd * std::pow(w[k], r - 1.0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const double Aab = A(a, b);
          centre_coef -= Aab * ev.D(a, b);
          for (const auto& t : st.D[a][b])
            if (t.col >= 0) row.emplace_back(static_cast<int>(k), t.col, -Aab * w[k] * t.coef);
          for (const auto& t : st.g[a])
            if (t.col >= 0) row.emplace_back(static_cast<int>(k), t.col, (1.0 - q) * Aab * t.coef * ev.g(b));
          for (const auto& t : st.g[b])
            if (t.col >= 0) row.emplace_back(static_cast<int>(k), t.col, (1.0 - q) * Aab * ev.g(a) * t.coef);
        }
      row.emplace_back(static_cast<int>(k), static_cast<int>(k), centre_coef);
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (auto& row : rows) trip.insert(trip.end(), row.begin(), row.end());
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw ConvergenceError("affine sphere: singular Newton matrix");
    Vec rhs(static_cast<Eigen::Index>(N));
    for (std::size_t k = 0; k < N; ++k) rhs(k) = -F[k];
    const Vec delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !delta.allFinite()) throw ConvergenceError("affine sphere: Newton solve failed");

    const double f0 = norm2(F);
    double wscale = 1.0;
    for (double v : w) wscale = std::max(wscale, v);
    const bool small_step = delta.cwiseAbs().maxCoeff() <= 100.0 * opt.tol * wscale;
    double alpha = 1.0;
    std::vector<double> trial(N), Ft;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      bool positive = true;
      for (std::size_t k = 0; k < N; ++k) {
        trial[k] = w[k] + alpha * delta(k);
        if (!(trial[k] > 0.0)) positive = false;
      }
      if (!positive) continue;
      if (!residual_of(trial, Ft)) continue;
      // Near the solution the merit stalls at rounding level; a tiny full step is taken as is.
      if (norm2(Ft) <= (1.0 - 1e-4 * alpha) * f0 || f0 == 0.0 || small_step) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("affine sphere: line search failed");
    double upd = 0.0, wmax = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      upd = std::max(upd, std::abs(trial[k] - w[k]));
      wmax = std::max(wmax, trial[k]);
    }
    w.swap(trial);
    F.swap(Ft);
    double fmax = 0.0;
    for (double v : F) fmax = std::max(fmax, std::abs(v));
    diag.update_history.push_back(upd);
    diag.residual_history.push_back(fmax);
    diag.iterations = it + 1;
    diag.final_update = upd;
    if (upd <= opt.tol * std::max(1.0, wmax)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("affine sphere: iteration cap reached");

  AffineSphere out;
  out.cone = cone;
  out.omega = shape;
  out.omega.convex = true;
  const std::size_t total = shape.size();
  out.grad.assign(total, Vec());
  out.hess.assign(total, Mat());
  out.residual.assign(total, 0.0);
  out.sigma_density.assign(total, 0.0);
  GridFn wfn = shape;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t i = disc.node(k);
    const Evaluated ev = evaluate_node(disc.stencil(k), w, w[k], q);
    out.omega.values[i] = -std::pow(w[k], q);
    wfn.values[i] = w[k];
    out.grad[i] = -q * std::pow(w[k], q - 1.0) * ev.g;
    out.hess[i] = q * std::pow(w[k], q - 2.0) * ev.M;
    out.residual[i] = std::abs(out.hess[i].determinant() - std::pow(w[k], -q * (d + 2)));
    out.sigma_density[i] = std::pow(w[k], -q * (d + 1));
  }
  for (std::size_t i : masked_cells(shape, 2)) diag.max_residual = std::max(diag.max_residual, out.residual[i]);
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.diag = diag;
  out.field = std::make_shared<InterpolatedSphere>(std::move(wfn), p);
  return out;
}

AffineSphere closed_form_sphere(const ConeModel& cone, int n_per_axis) {
  auto field = std::make_shared<ClosedFormSphere>(cone);
  AffineSphere out;
  out.cone = cone;
  out.omega = sample_omega_star(cone, n_per_axis, [&](const Vec& y) { return field->value(y); });
  out.omega.convex = true;
  const std::size_t total = out.omega.size();
  out.grad.assign(total, Vec());
  out.hess.assign(total, Mat());
  out.residual.assign(total, 0.0);
  out.sigma_density.assign(total, 0.0);
  const int d = cone.d();
  for (std::size_t i = 0; i < total; ++i) {
    if (!out.omega.masked(i)) continue;
    const Vec y = out.omega.spec.node(i);
    const double m = -out.omega.values[i];
    out.grad[i] = field->gradient(y);
    out.hess[i] = field->hessian(y);
    out.residual[i] = std::abs(out.hess[i].determinant() - std::pow(m, -(d + 2.0)));
    out.sigma_density[i] = std::pow(m, -(d + 1.0));
  }
  for (std::size_t i : masked_cells(out.omega, 2))
    out.diag.max_residual = std::max(out.diag.max_residual, out.residual[i]);
  out.field = field;
  return out;
}

Vec c_normal(const ScalarField& omega, const Vec& y) {
  const Vec g = omega.gradient(y);
  Vec N(y.size() + 1);
  N.head(y.size()) = g;
  N(y.size()) = g.dot(y) - omega.value(y);
  return N;
}

Vec c_normal(const AffineSphere& sphere, const Vec& y) {
  if (!sphere.cone.inside_omega_star(y) || sphere.cone.boundary_distance(y) < 2.0 * sphere.omega.spec.hmax())
    throw ValidationError("c_normal: point within two cells of the boundary");
  return c_normal(*sphere.field, y);
}

double sigma_volume(const AffineSphere& sphere, const CellSet& cells) {
  const GridSpec& s = sphere.omega.spec;
  double half_diag = 0.0;
  for (int a = 0; a < s.d; ++a) half_diag += 0.25 * s.h(a) * s.h(a);
  half_diag = std::sqrt(half_diag);
  std::vector<double> parts;
  parts.reserve(cells.size());
  for (std::size_t i : cells) {
    if (i >= s.size() || !sphere.omega.masked(i) || sphere.cone.boundary_distance(s.node(i)) <= half_diag)
      throw ValidationError("sigma_volume: cell touches the boundary of Omega*");
    parts.push_back(sphere.sigma_density[i] * s.cell_volume());
  }
  return pairwise_sum(parts);
}

}  // namespace conevex
