#pragma once

#include "conevex/invariant.hpp"

#include <optional>
#include <vector>

namespace conevex {

struct CovolumeMc {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
  std::size_t escapes = 0;  // region probes outside the sampling box
  int word_bound = 0;
};

struct CovolumeReport {
  double value = 0.0;
  int path_samples = 0;
  std::vector<double> path_integrand;  // sum_j h_j A_j(K_l) at each l-node
  std::size_t restored_nodes = 0;
  std::optional<CovolumeMc> mc;
};

// Integral over l in [0,1] of sum_j h_j A_j(K_l), K_l = (1-l) D_tau + l K.
CovolumeReport covolume(const TauBody& body, int path_nodes = 8, Exec exec = Exec::Parallel);

// Volume of DL_{y0} minus K by uniform sampling of a box around the region.
CovolumeMc covolume_mc(const TauBody& body, const Vec& y0, std::size_t samples, std::uint64_t seed,
                       Exec exec = Exec::Parallel);

// (1-t) covol(K0) + t covol(K1) - covol((1-t) K0 + t K1).
double convexity_gap(const TauBody& b0, const TauBody& b1, double t, int path_nodes = 8);

struct GateauxReport {
  std::vector<double> t;
  std::vector<double> quotient;
  std::vector<double> rel_error;
  double target = 0.0;
  bool escaped = false;  // some perturbation left D_tau
  bool central = false;  // central differences (h - t f stays inside D_tau)
};

// Difference quotients of covol along h + t f (support s + t f omega) against sum_j f_j A_j.
// Central differences when h - t f >= 0 for the largest t, forward otherwise.
GateauxReport gateaux_check(const TauBody& body, const std::vector<double>& f, const std::vector<double>& ts,
                            int path_nodes = 8);

struct SandwichReport {
  double lower = 0.0;
  double difference = 0.0;
  double upper = 0.0;
};
// For K1 inside K0: int (h1-h0) dA(K0) <= covol(K1) - covol(K0) <= int (h1-h0) dA(K1).
SandwichReport covolume_sandwich(const TauBody& k0, const TauBody& k1, int path_nodes = 8);

// Raised-cosine bump on the torus centred at theta0 with radius r (theta units).
std::vector<double> torus_bump(const FundamentalDomain& dom, const Vec& theta0, double radius);

}  // namespace conevex
