#pragma once

#include "conevex/grid.hpp"
#include "conevex/sphere.hpp"
#include "conevex/types.hpp"

#include <memory>
#include <vector>

namespace conevex {

struct Atom {
  std::size_t node;
  Vec location;
  double mass;
};

// Radon measure on grid cells (one cell per node): node masses, some flagged as atoms.
struct DiscreteMeasure {
  GridSpec spec;
  std::vector<double> mass;
  std::vector<std::uint8_t> atom;
  std::vector<std::uint8_t> defined;  // nodes where the measure was evaluated

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(GridSpec s);

  double density(std::size_t i) const { return mass[i] / spec.cell_volume(); }
  double total() const;
  double total(const CellSet& cells) const;
  std::vector<Atom> atoms() const;
  DiscreteMeasure restricted(const CellSet& cells) const;
};

// C-convex domain given by its support function on the nodes of the sphere grid.
struct Body {
  GridFn support;
  std::shared_ptr<const AffineSphere> sphere;
  std::shared_ptr<const ScalarField> field;  // exact support, when known (Monte Carlo mode)
  bool c2plus = false;

  const ConeModel& cone() const { return sphere->cone; }
};

// s(y) = v.(y,-1) + t omega(y): support of v + C + t Sigma.
class OffsetSupport : public ScalarField {
 public:
  OffsetSupport(Vec v, double t, std::shared_ptr<const ScalarField> omega)
      : v_(std::move(v)), t_(t), omega_(std::move(omega)) {}
  double value(const Vec& y) const override;
  Vec gradient(const Vec& y) const override;
  Mat hessian(const Vec& y) const override;
  double t() const { return t_; }
  const Vec& v() const { return v_; }

 private:
  Vec v_;
  double t_;
  std::shared_ptr<const ScalarField> omega_;
};

// Validates convexity and attaches the C2-plus certificate: positive-definite
// discrete Hessians at every node with a full radius-2 stencil.
Body make_body(GridFn support, std::shared_ptr<const AffineSphere> sphere,
               std::shared_ptr<const ScalarField> field = nullptr);
Body offset_body(std::shared_ptr<const AffineSphere> sphere, const Vec& v, double t);
// Support of K + t Sigma.
Body add_sigma(const Body& body, double t);

DiscreteMeasure ma_measure(const GridFn& s, Exec exec = Exec::Parallel);
DiscreteMeasure area_measure(const Body& body, Exec exec = Exec::Parallel);

// Nodes whose cells stay inside Omega* and have a full radius-2 stencil.
CellSet measurable_cells(const Body& body);

// Smooth mode: int_b int_0^eps (-omega) det Hess(s + t omega) dt dy.
DiscreteMeasure parallel_volume(const Body& body, double eps, Exec exec = Exec::Parallel);
double parallel_volume(const Body& body, double eps, const CellSet& b);

// Maximises x.y - s(y) - t omega(y) over Omega* by damped Newton, starting from y.
// Needs s + t omega strictly convex; returns false when the iteration fails.
bool conjugate_point(const ConeModel& cone, const ScalarField& s, const ScalarField& omega, double t, const Vec& x,
                     Vec& y, double& value);

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
  std::size_t failures = 0;  // samples whose retraction could not be resolved
};

// Monte Carlo mode via the retraction onto the boundary of K along C-normals.
McEstimate parallel_volume_mc(const Body& body, double eps, const CellSet& b, std::size_t samples,
                              std::uint64_t seed, Exec exec = Exec::Parallel);

struct SteinerCoeffs {
  std::vector<DiscreteMeasure> S;  // S_0..S_d
  std::vector<double> eps;
  double condition = 0.0;
  int d = 0;

  // V_eps reconstructed from the coefficients.
  double predict(double e, const CellSet& cells) const;
};

std::vector<double> default_steiner_nodes(int d);
// Per-cell Lagrange extraction from volumes at d+1 distinct nodes.
SteinerCoeffs steiner_fit(const std::vector<DiscreteMeasure>& volumes, const std::vector<double>& eps);
SteinerCoeffs steiner_fit(const Body& body, const std::vector<double>& eps, Exec exec = Exec::Parallel);

// phi = (-omega)^{-d-2} / det Hess s at nodes with a full stencil.
GridFn c_curvature(const Body& body);

struct Radii {
  std::vector<Vec> curvatures;  // eigenvalues of (Hess s)^{-1} Hess omega
  std::vector<Vec> radii;
  std::vector<Vec> sigma;  // elementary symmetric means of the radii, sigma_0 = 1
};
Radii shape_operator_radii(const Body& body);

double curvature_conversion(double kappa, int d);

}  // namespace conevex
