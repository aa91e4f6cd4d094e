#pragma once

#include "conevex/body.hpp"
#include "conevex/cone.hpp"
#include "conevex/convex.hpp"
#include "conevex/grid.hpp"
#include "conevex/sphere.hpp"

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace conevex {

// Support of the maximal domain D_tau: closed form v.(y,-1) for a coboundary
// cocycle, or the convex envelope of supplied boundary samples of g_tau.
struct MaximalDomain {
  enum class Mode { Coboundary, Envelope };
  Mode mode = Mode::Coboundary;
  Vec v;
  PLGraphHull envelope;
  std::vector<std::pair<Vec, double>> boundary_data;
  GridFn s_tau;  // sampled on the Omega* grid

  double value(const Vec& y) const;
  Vec gradient(const Vec& y) const;
  // Membership of X in D_tau (coboundary mode: X - v in C).
  bool contains(const ConeModel& cone, const Vec& X) const;
};

MaximalDomain maximal_domain(const GroupAction& action, const ConeModel& cone, int n_per_axis,
                             const std::vector<std::pair<Vec, double>>& boundary_samples = {});

// Forced boundary value tau(g).Y / (1 - mu) of the total support function at an
// eigencovector Y (g^{-1} acting on covectors as g^T, with g^T Y = mu Y).
double g_tau_at_eigendirection(const GroupElement& g, const Vec& Y, double mu);

// Fundamental domain of the diagonal lattice acting on Omega* for a simplicial cone.
// Log-ratio coordinates xi_j = log l_j - log l_0 turn the dual action into translations;
// nodes sit at cell centres xi = T theta, theta in [-1/2, 1/2)^d.
class FundamentalDomain {
 public:
  struct Neighbour {
    std::size_t node;           // torus index
    std::array<int, 3> wrap;    // lattice offset in generator units
    Vec y;                      // position of the ghost in Omega*
    double omega;               // affine sphere at y
  };

  FundamentalDomain(const ConeModel& cone, const GroupAction& action, int n, int radius = 2);

  const ConeModel& cone() const { return cone_; }
  const GroupAction& action() const { return action_; }
  int n() const { return n_; }
  int d() const { return cone_.d(); }
  int radius() const { return radius_; }
  std::size_t size() const { return ys_.size(); }
  const Mat& translations() const { return T_; }

  Vec theta(std::size_t i) const;
  Vec xi(std::size_t i) const { return T_ * theta(i); }
  const Vec& y(std::size_t i) const { return ys_[i]; }
  double omega(std::size_t i) const { return omega_[i]; }
  const std::vector<Neighbour>& stencil(std::size_t i) const { return stencil_[i]; }
  const ScalarField& sphere() const { return *sphere_; }
  std::shared_ptr<const ScalarField> sphere_ptr() const { return sphere_; }

  Vec xi_of_y(const Vec& y) const;
  Vec y_of_xi(const Vec& xi) const;
  Mat jacobian(const Vec& xi) const;  // dy/dxi
  double cell_area_xi() const;
  double sigma_density_xi() const;  // constant
  double sigma_volume() const;      // vol_Sigma(F)
  double cell_sigma_volume() const { return sigma_density_xi() * cell_area_xi(); }

  // Lattice element acting on Omega* by the translation T m in xi.
  GroupElement lattice_element(const std::array<int, 3>& m) const;
  // Torus node whose cell contains xi modulo the lattice, and the lattice offset.
  std::size_t locate(const Vec& xi, std::array<int, 3>& wrap) const;

 private:
  ConeModel cone_;
  GroupAction action_;
  int n_;
  int radius_;
  Mat T_;
  std::vector<Mat> gen_lin_;
  std::vector<Vec> ys_;
  std::vector<double> omega_;
  std::vector<std::vector<Neighbour>> stencil_;
  std::shared_ptr<const ScalarField> sphere_;
};

// tau-convex domain on the torus: s = s_tau + h omega, with h = (s - s_tau)/omega >= 0
// Gamma-invariant, so one value per orbit.
struct TauBody {
  std::shared_ptr<const FundamentalDomain> dom;
  std::shared_ptr<const MaximalDomain> dmax;
  std::vector<double> h;

  double support_at(std::size_t node) const;
  double support_at(const FundamentalDomain::Neighbour& nb) const;
};

TauBody make_tau_body(std::shared_ptr<const FundamentalDomain> dom, std::shared_ptr<const MaximalDomain> dmax,
                      std::vector<double> h);
TauBody sigma_offset(std::shared_ptr<const FundamentalDomain> dom, std::shared_ptr<const MaximalDomain> dmax,
                     double t);

// Per-node area measure (-omega)|subgradient polygon| on the torus.
struct TorusArea {
  std::vector<double> mass;
  // Sparse derivative d mass_j / d h_m as (m, value) lists.
  std::vector<std::vector<std::pair<std::size_t, double>>> jac;
  std::size_t open_cells = 0;  // polygons left unbounded by the stencil
};
TorusArea torus_area(const TauBody& body, bool with_jacobian = false, Exec exec = Exec::Parallel);

// Lowers nodes lying above the local lower hull of their stencil until no node
// changes or the sweep cap is hit; returns the number of node updates. Large
// concave regions converge slowly (diffusive fill-in).
std::size_t restore_convexity(TauBody& body, int sweeps = 200);
bool is_locally_convex(const TauBody& body, double tol = 1e-12);

// Equivariance defect of grid support functions on Omega*, with the tracked
// bilinear interpolation error.
struct EquivarianceReport {
  double max_defect = 0.0;
  double max_interp_bound = 0.0;
  double max_excess = 0.0;  // defect minus interpolation bound (clamped at 0)
  std::size_t samples = 0;
  std::size_t skipped = 0;
};
EquivarianceReport equivariance_residual(const GridFn& s, const GroupAction& action, const ConeModel& cone,
                                         const ScalarField& omega, std::size_t samples, std::uint64_t seed);

double hausdorff_distance(const TauBody& a, const TauBody& b);

struct CosmologicalExtremes {
  double t_min = 0.0;
  double t_max = 0.0;
};
CosmologicalExtremes cosmological_extremes(const TauBody& b);

// Restriction of a torus measure to node subsets (the quotient by Gamma).
double quotient_mass(const std::vector<double>& mass, const std::vector<std::size_t>& cells);

// Area measure of an Omega*-grid body over gamma*b, by subcell sampling of the image.
double area_of_image(const DiscreteMeasure& area, const ConeModel& cone, const Mat& g, const CellSet& b,
                     int subdivisions = 4);

// Dirichlet-Lee domain test with the cached words.
bool dirichlet_lee_member(const Vec& P, const Vec& y0, const GroupAction& action, const MaximalDomain& dmax,
                          const ConeModel& cone, double tol = 0.0);

struct CoveringReport {
  std::size_t samples = 0;
  std::size_t covered = 0;
  std::size_t uncovered = 0;
  std::vector<Vec> failures;  // first few uncovered samples
  double fraction() const { return samples ? static_cast<double>(covered) / samples : 0.0; }
};
CoveringReport dirichlet_lee_covering(const FundamentalDomain& dom, const MaximalDomain& dmax, const Vec& y0,
                                      std::size_t samples, double t_lo, double t_hi, std::uint64_t seed);

}  // namespace conevex
