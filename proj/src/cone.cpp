#include "conevex/cone.hpp"

#include "conevex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conevex {

namespace {

Mat regular_simplex_vertices(int d) {
  // Centre the standard basis of R^{d+1}, express it in an orthonormal basis
  // of the sum-zero hyperplane, then scale to unit circumradius.
  const int m = d + 1;
  Mat E = Mat::Identity(m, m) - Mat::Constant(m, m, 1.0 / m);
  Mat B(m, d);
  for (int k = 0; k < d; ++k) {
    Vec v = E.col(k);
    for (int j = 0; j < k; ++j) v -= B.col(j).dot(v) * B.col(j);
    B.col(k) = v.normalized();
  }
  Mat A = B.transpose() * E;
  for (int i = 0; i < m; ++i) A.col(i).normalize();
  return A;
}

}  // namespace

ConeModel ConeModel::quadratic(int d) {
  if (d < 1 || d > 3) throw ValidationError("quadratic cone: d must be in 1..3");
  ConeModel c;
  c.kind_ = ConeKind::Quadratic;
  c.d_ = d;
  return c;
}

ConeModel ConeModel::simplicial(int d) {
  if (d < 1 || d > 3) throw ValidationError("simplicial cone: d must be in 1..3");
  Mat A = regular_simplex_vertices(d);
  Mat R(d + 1, d + 1);
  R.topRows(d) = A;
  R.row(d).setOnes();
  return simplicial_from_rays(R);
}

ConeModel ConeModel::simplicial_from_rays(const Mat& rays) {
  const int m = static_cast<int>(rays.rows());
  if (rays.cols() != m || m < 2 || m > 4) throw ValidationError("simplicial cone: need d+1 rays in R^{d+1}");
  ConeModel c;
  c.kind_ = ConeKind::Simplicial;
  c.d_ = m - 1;
  c.rays_ = rays;
  for (int i = 0; i < m; ++i) {
    if (!(rays(m - 1, i) > 0.0)) throw ValidationError("simplicial cone: rays need positive last coordinate");
    c.rays_.col(i) /= rays(m - 1, i);
  }
  if (std::abs(c.rays_.determinant()) < 1e-12) throw ValidationError("simplicial cone: rays are degenerate");
  c.rays_inv_ = c.rays_.inverse();
  c.verts_ = c.rays_.topRows(c.d_);
  // 0 must lie inside Omega: its ray (0,...,0,1) has positive ray coordinates.
  Vec e = Vec::Zero(m);
  e(m - 1) = 1.0;
  Vec t = c.rays_inv_ * e;
  if ((t.array() <= 0.0).any()) throw ValidationError("simplicial cone: Omega must contain 0");
  // Scale of the affine sphere, fixed from the Hessian of -prod(l)^beta at y = 0.
  const int d = c.d_;
  const double beta = 1.0 / (d + 1);
  Mat S = Mat::Zero(d, d);
  Vec g = Vec::Zero(d);
  for (int i = 0; i < m; ++i) {
    S += c.verts_.col(i) * c.verts_.col(i).transpose();
    g += c.verts_.col(i);
  }
  Mat H = beta * (S - beta * g * g.transpose());
  double K = H.determinant();
  c.sphere_scale_ = std::pow(K, -1.0 / (2.0 * d + 2.0));
  return c;
}

bool ConeModel::inside_omega(const Vec& x) const {
  if (kind_ == ConeKind::Quadratic) return x.norm() < 1.0;
  Vec X(d_ + 1);
  X.head(d_) = x;
  X(d_) = 1.0;
  return ((rays_inv_ * X).array() > 0.0).all();
}

bool ConeModel::inside_omega_star(const Vec& y) const {
  if (kind_ == ConeKind::Quadratic) return y.norm() < 1.0;
  return ((verts_.transpose() * y).array() < 1.0).all();
}

double ConeModel::boundary_distance(const Vec& y) const {
  if (kind_ == ConeKind::Quadratic) return std::max(0.0, 1.0 - y.norm());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= d_; ++i) {
    const double n = verts_.col(i).norm();
    best = std::min(best, (1.0 - verts_.col(i).dot(y)) / n);
  }
  return std::max(0.0, best);
}

double ConeModel::ray_exit(const Vec& y, const Vec& u) const {
  if (kind_ == ConeKind::Quadratic) {
    const double b = y.dot(u);
    const double c = y.squaredNorm() - 1.0;
    const double a = u.squaredNorm();
    return (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= d_; ++i) {
    const double au = verts_.col(i).dot(u);
    if (au > 0.0) best = std::min(best, (1.0 - verts_.col(i).dot(y)) / au);
  }
  return best;
}

double ConeModel::gauge_star(const Vec& y) const {
  if (kind_ == ConeKind::Quadratic) return y.norm();
  return std::max(0.0, (verts_.transpose() * y).maxCoeff());
}

std::vector<Vec> ConeModel::star_vertices() const {
  std::vector<Vec> out;
  if (kind_ != ConeKind::Simplicial) return out;
  for (int k = 0; k <= d_; ++k) {
    Mat M(d_, d_);
    int r = 0;
    for (int i = 0; i <= d_; ++i)
      if (i != k) M.row(r++) = verts_.col(i).transpose();
    out.push_back(M.fullPivLu().solve(Vec::Ones(d_)));
  }
  return out;
}

void ConeModel::bounding_box_star(Vec& lo, Vec& hi) const {
  if (kind_ == ConeKind::Quadratic) {
    lo = Vec::Constant(d_, -1.0);
    hi = Vec::Constant(d_, 1.0);
    return;
  }
  auto vs = star_vertices();
  lo = vs[0];
  hi = vs[0];
  for (const auto& v : vs) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

bool ConeModel::in_cone(const Vec& X, double tol) const {
  if (kind_ == ConeKind::Quadratic) return X.head(d_).norm() < X(d_) - tol;
  return ((rays_inv_ * X).array() > tol).all();
}

bool ConeModel::in_closed_cone(const Vec& X, double tol) const {
  if (kind_ == ConeKind::Quadratic) return X.head(d_).norm() <= X(d_) + tol;
  return ((rays_inv_ * X).array() >= -tol).all();
}

std::vector<Vec> ConeModel::sample_boundary_rays(int n) const {
  std::vector<Vec> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Vec X(d_ + 1);
    if (kind_ == ConeKind::Quadratic) {
      Vec u(d_);
      if (d_ == 1) {
        u(0) = (k % 2 == 0) ? 1.0 : -1.0;
      } else if (d_ == 2) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / n;
        u << std::cos(th), std::sin(th);
      } else {
        const double z = 1.0 - 2.0 * (k + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ph = std::numbers::pi * (3.0 - std::sqrt(5.0)) * k;
        u << r * std::cos(ph), r * std::sin(ph), z;
      }
      X.head(d_) = u;
      X(d_) = 1.0;
    } else {
      const int omit = k % (d_ + 1);
      X.setZero();
      double total = 0.0;
      for (int i = 0; i <= d_; ++i) {
        if (i == omit) continue;
        const double w = 0.05 + counter_uniform(0x5eed, static_cast<std::uint64_t>(i), k);
        X += w * rays_.col(i);
        total += w;
      }
      X /= total;
    }
    out.push_back(X);
  }
  return out;
}

Vec ConeModel::dual_forms(const Vec& y) const {
  if (kind_ != ConeKind::Simplicial) throw ValidationError("dual_forms: simplicial cones only");
  return Vec::Ones(d_ + 1) - verts_.transpose() * y;
}

Vec ConeModel::ray_coordinates(const Vec& X) const {
  if (kind_ != ConeKind::Simplicial) throw ValidationError("ray_coordinates: simplicial cones only");
  return rays_inv_ * X;
}

double ConeModel::boundary_exponent() const {
  return kind_ == ConeKind::Quadratic ? 2.0 : static_cast<double>(d_ + 1);
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  GroupElement g;
  g.lin = a.lin * b.lin;
  g.tau = a.lin * b.tau + a.tau;
  g.word = a.word;
  g.word.insert(g.word.end(), b.word.begin(), b.word.end());
  return g;
}

GroupElement inverse(const GroupElement& g) {
  GroupElement r;
  r.lin = g.lin.inverse();
  r.tau = -(r.lin * g.tau);
  r.word.assign(g.word.rbegin(), g.word.rend());
  for (auto& l : r.word) l = -l;
  return r;
}

GroupElement identity_element(int dim) {
  return GroupElement{Mat::Identity(dim, dim), Vec::Zero(dim), {}};
}

namespace {

bool same_matrix(const Mat& a, const Mat& b) {
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

}  // namespace

GroupAction::GroupAction(const ConeModel& cone, std::vector<GroupElement> generators, int word_bound)
    : dim_(cone.dim()), word_bound_(word_bound), gens_(std::move(generators)) {
  if (word_bound < 0) throw ValidationError("word_bound must be nonnegative");
  const auto rays = cone.sample_boundary_rays(100);
  Vec apex_dir = Vec::Zero(dim_);
  apex_dir(dim_ - 1) = 1.0;
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    auto& g = gens_[k];
    if (g.lin.rows() != dim_ || g.lin.cols() != dim_ || g.tau.size() != dim_)
      throw ValidationError("generator has wrong dimension");
    if (std::abs(g.lin.determinant() - 1.0) > 1e-10) throw ValidationError("generator determinant is not 1");
    if (!cone.in_cone(g.lin * apex_dir)) throw ValidationError("generator does not preserve the cone");
    for (const auto& X : rays) {
      Vec gX = g.lin * X;
      if (!cone.in_closed_cone(gX, 1e-9 * gX.norm())) throw ValidationError("generator does not preserve the cone");
    }
    g.word = {static_cast<int>(k) + 1};
  }
  cache_.push_back(identity_element(dim_));
  std::vector<GroupElement> letters;
  for (const auto& g : gens_) {
    letters.push_back(g);
    letters.push_back(inverse(g));
  }
  std::size_t frontier_begin = 0;
  for (int len = 1; len <= word_bound_; ++len) {
    const std::size_t frontier_end = cache_.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (const auto& l : letters) {
        GroupElement p = compose(cache_[i], l);
        bool dup = false;
        for (const auto& c : cache_) {
          if (same_matrix(c.lin, p.lin)) {
            const double scale = std::max(1.0, c.tau.cwiseAbs().maxCoeff());
            if ((c.tau - p.tau).cwiseAbs().maxCoeff() > 1e-10 * scale)
              throw ValidationError("translations violate the cocycle relation");
            dup = true;
            break;
          }
        }
        if (!dup) cache_.push_back(std::move(p));
      }
    }
    frontier_begin = frontier_end;
  }
}

double GroupAction::cocycle_defect() const {
  double worst = 0.0;
  for (const auto& a : cache_) {
    for (const auto& b : cache_) {
      GroupElement p = compose(a, b);
      for (const auto& c : cache_) {
        if (same_matrix(c.lin, p.lin)) {
          worst = std::max(worst, (c.tau - p.tau).cwiseAbs().maxCoeff());
          break;
        }
      }
    }
  }
  return worst;
}

GroupAction coboundary_cocycle(const ConeModel& cone, const std::vector<Mat>& generators, const Vec& v,
                               int word_bound) {
  if (v.size() != cone.dim()) throw ValidationError("coboundary vector has wrong dimension");
  std::vector<GroupElement> gens;
  for (const auto& g : generators) {
    Mat I = Mat::Identity(g.rows(), g.cols());
    gens.push_back(GroupElement{g, (I - g) * v, {}});
  }
  GroupAction a(cone, std::move(gens), word_bound);
  a.set_coboundary_vector(v);
  return a;
}

GroupElement cocycle_extend(const GroupAction& action, const std::vector<int>& word) {
  GroupElement acc = identity_element(action.dim());
  const int ng = static_cast<int>(action.generators().size());
  for (int l : word) {
    if (l == 0 || std::abs(l) > ng) throw ValidationError("word letter out of range");
    const auto& g = action.generators()[std::abs(l) - 1];
    acc = compose(acc, l > 0 ? g : inverse(g));
  }
  acc.word = word;
  return acc;
}

Vec dual_projective_action(const ConeModel& cone, const Mat& g, const Vec& y) {
  const int d = cone.d();
  if (y.size() != d) throw ValidationError("dual action: wrong point dimension");
  if (!cone.inside_omega_star(y)) throw ValidationError("dual action: point outside Omega*");
  Vec Y(d + 1);
  Y.head(d) = y;
  Y(d) = -1.0;
  Vec Z = g.transpose().partialPivLu().solve(Y);
  if (!(Z(d) < 0.0)) throw ValidationError("dual action: map does not preserve the cone");
  Vec out = Z.head(d) / (-Z(d));
  if (!cone.inside_omega_star(out)) throw ValidationError("dual action: map does not preserve the cone");
  return out;
}

Mat diagonal_in_ray_basis(const ConeModel& cone, const Vec& eigenvalues) {
  if (cone.kind() != ConeKind::Simplicial) throw ValidationError("diagonal elements need a simplicial cone");
  if (eigenvalues.size() != cone.dim()) throw ValidationError("eigenvalue vector has wrong length");
  if ((eigenvalues.array() <= 0.0).any()) throw ValidationError("eigenvalues must be positive");
  return cone.rays() * eigenvalues.asDiagonal() * cone.rays().inverse();
}

}  // namespace conevex
