#pragma once

#include "conevex/covolume.hpp"

#include <string>
#include <vector>

namespace conevex {

enum class MinkowskiMode { Variational, Newton };

struct MinkowskiConfig {
  MinkowskiMode mode = MinkowskiMode::Variational;
  int max_iter = 200;
  double rel_change_tol = 1e-7;
  double tv_tol = 2e-2;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  int path_nodes = 8;
  // Initial h (constant); negative selects t0 = (mu_total / vol_Sigma(F))^{1/d}.
  double initial_offset = -1.0;
};

// mu: one mass per torus node.
struct MinkowskiProblem {
  std::shared_ptr<const FundamentalDomain> dom;
  std::shared_ptr<const MaximalDomain> dmax;
  std::vector<double> mu;
  MinkowskiConfig config;
};

struct TraceRow {
  int iteration = 0;
  double L = 0.0;
  double tv = 0.0;  // ||A - mu||_TV over the mass floor
  double step = 0.0;
  int backtracks = 0;
  std::size_t restored = 0;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  std::string message;
};

struct MinkowskiResult {
  TauBody body;
  SolveTrace trace;
};

// L_mu(h) = covol(h) - sum_j h_j mu_j.
double minkowski_functional(const TauBody& body, const std::vector<double>& mu, int path_nodes = 8);

MinkowskiResult solve_minkowski(const MinkowskiProblem& problem);

struct ResidualReport {
  std::vector<double> diff;  // A(K)(cell) - mu(cell)
  double total = 0.0;
  double tv = 0.0;
};
ResidualReport minkowski_residual(const TauBody& body, const std::vector<double>& mu);

struct ContactAdvisory {
  double t_min = 0.0;
  double total_area = 0.0;
  double spacing = 0.0;
  bool flagged = false;
};
// Flags possible contact with the boundary of D_tau when T_min < 3 grid spacings.
ContactAdvisory boundary_contact_guard(const TauBody& body);

// Sigma-volume of each torus cell scaled by t^d: the area measure of D_tau + t Sigma.
std::vector<double> sigma_offset_measure(const FundamentalDomain& dom, double t);

}  // namespace conevex
