#include "conevex/minkowski.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conevex {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return pairwise_sum(p);
}

Sparse jacobian_matrix(const TorusArea& a) {
  const auto n = static_cast<Eigen::Index>(a.mass.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index j = 0; j < n; ++j)
    for (const auto& [m, v] : a.jac[j]) {
      trip.emplace_back(j, static_cast<Eigen::Index>(m), 0.5 * v);
      trip.emplace_back(static_cast<Eigen::Index>(m), j, 0.5 * v);
    }
  Sparse J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

double mass_floor(const FundamentalDomain& dom, const std::vector<double>& mu) {
  return std::max(pairwise_sum(mu), 1e-3 * dom.sigma_volume());
}

}  // namespace

std::vector<double> sigma_offset_measure(const FundamentalDomain& dom, double t) {
  return std::vector<double>(dom.size(), std::pow(t, dom.d()) * dom.cell_sigma_volume());
}

double minkowski_functional(const TauBody& body, const std::vector<double>& mu, int path_nodes) {
  if (mu.size() != body.h.size()) throw ValidationError("minkowski: measure has wrong size");
  return covolume(body, path_nodes).value - dot(body.h, mu);
}

ResidualReport minkowski_residual(const TauBody& body, const std::vector<double>& mu) {
  if (mu.size() != body.h.size()) throw ValidationError("minkowski residual: measure has wrong size");
  const TorusArea a = torus_area(body);
  ResidualReport r;
  r.diff.resize(mu.size());
  std::vector<double> absd(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    r.diff[i] = a.mass[i] - mu[i];
    absd[i] = std::abs(r.diff[i]);
  }
  r.total = pairwise_sum(r.diff);
  r.tv = pairwise_sum(absd);
  return r;
}

ContactAdvisory boundary_contact_guard(const TauBody& body) {
  const FundamentalDomain& dom = *body.dom;
  ContactAdvisory c;
  c.t_min = cosmological_extremes(body).t_min;
  c.total_area = pairwise_sum(torus_area(body).mass);
  for (std::size_t j = 0; j < dom.size(); ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& nb : dom.stencil(j)) nearest = std::min(nearest, (nb.y - dom.y(j)).norm());
    c.spacing = std::max(c.spacing, nearest);
  }
  c.flagged = c.t_min < 3.0 * c.spacing;
  return c;
}

MinkowskiResult solve_minkowski(const MinkowskiProblem& pb) {
  if (!pb.dom || !pb.dmax) throw ValidationError("minkowski: missing domain data");
  const FundamentalDomain& dom = *pb.dom;
  const MinkowskiConfig& cfg = pb.config;
  const std::size_t n = dom.size();
  if (pb.mu.size() != n) throw ValidationError("minkowski: measure has wrong size");
  for (double m : pb.mu)
    if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("minkowski: masses must be finite and nonnegative");
  const double mu_total = pairwise_sum(pb.mu);
  const double floor = mass_floor(dom, pb.mu);
  const double t0 = std::pow(mu_total / dom.sigma_volume(), 1.0 / dom.d());
  const double init = cfg.initial_offset >= 0.0 ? cfg.initial_offset : t0;
  const double l_floor = 1e-6 * dom.sigma_volume();

  MinkowskiResult res{sigma_offset(pb.dom, pb.dmax, init), {}};
  TauBody& body = res.body;

  // Fixed preconditioner: area Jacobian of the matched Sigma-offset.
  Eigen::SimplicialLDLT<Sparse> pre;
  Sparse P;
  {
    const double tref = t0 > 0.0 ? t0 : 1.0;
    P = jacobian_matrix(torus_area(sigma_offset(pb.dom, pb.dmax, tref), true));
    pre.compute(P);
    if (pre.info() != Eigen::Success) throw ConvergenceError("minkowski: preconditioner factorization failed");
  }

  double L = minkowski_functional(body, pb.mu, cfg.path_nodes);
  for (int it = 0; it < cfg.max_iter; ++it) {
    const TorusArea a = torus_area(body, cfg.mode == MinkowskiMode::Newton);
    Eigen::VectorXd g(n);
    std::vector<double> absd(n);
    for (std::size_t i = 0; i < n; ++i) {
      g(i) = a.mass[i] - pb.mu[i];
      absd[i] = std::abs(g(i));
    }
    const double tv = pairwise_sum(absd) / floor;
    if (it == 0) res.trace.rows.push_back(TraceRow{0, L, tv, 0.0, 0, 0});

    Eigen::VectorXd dir;
    if (cfg.mode == MinkowskiMode::Variational) {
      dir = -pre.solve(g);
    } else {
      const Sparse J = jacobian_matrix(a);
      double lambda = 1e-8;
      for (;;) {
        Eigen::SimplicialLDLT<Sparse> solver(Sparse(J + lambda * P));
        if (solver.info() == Eigen::Success) {
          dir = -solver.solve(g);
          if (dir.allFinite() && dir.dot(g) < 0.0) break;
        }
        lambda *= 10.0;
        if (lambda > 1e8) throw ConvergenceError("minkowski: Newton system could not be regularized");
      }
    }
    const double slope = g.dot(dir);
    if (tv < cfg.tv_tol && -slope <= cfg.rel_change_tol * std::max(std::abs(L), l_floor)) {
      res.trace.converged = true;
      res.trace.message = "converged";
      break;
    }
    if (!(slope < 0.0)) {
      res.trace.converged = tv < cfg.tv_tol;
      res.trace.message = "no descent direction";
      break;
    }

    double alpha = 1.0;
    int back = 0;
    bool accepted = false;
    TauBody trial = body;
    double Lt = L;
    std::size_t restored = 0;
    for (; back <= cfg.max_backtracks; ++back) {
      trial = body;
      for (std::size_t i = 0; i < n; ++i) trial.h[i] = std::max(0.0, body.h[i] + alpha * dir(i));
      restored = restore_convexity(trial);
      Lt = minkowski_functional(trial, pb.mu, cfg.path_nodes);
      std::vector<double> step(n);
      for (std::size_t i = 0; i < n; ++i) step[i] = trial.h[i] - body.h[i];
      const double pred = std::min(alpha * slope, g.dot(Eigen::Map<Eigen::VectorXd>(step.data(), n)));
      if (Lt <= L + cfg.armijo * pred) {
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    if (!accepted) {
      res.trace.converged = tv < cfg.tv_tol;
      res.trace.message = "line search failed at minimal step";
      break;
    }
    const double dL = std::abs(Lt - L);
    body = std::move(trial);
    L = Lt;
    const TorusArea an = torus_area(body);
    for (std::size_t i = 0; i < n; ++i) absd[i] = std::abs(an.mass[i] - pb.mu[i]);
    const double tv_new = pairwise_sum(absd) / floor;
    res.trace.rows.push_back(TraceRow{it + 1, L, tv_new, alpha, back, restored});
    if (dL <= cfg.rel_change_tol * std::max(std::abs(L), l_floor) && tv_new < cfg.tv_tol) {
      res.trace.converged = true;
      res.trace.message = "converged";
      break;
    }
  }
  if (res.trace.message.empty()) res.trace.message = "iteration cap reached";
  return res;
}

}  // namespace conevex
