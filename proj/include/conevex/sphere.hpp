#pragma once

#include "conevex/cone.hpp"
#include "conevex/grid.hpp"
#include "conevex/types.hpp"

#include <memory>
#include <vector>

namespace conevex {

struct SphereOptions {
  double tol = 1e-8;       // sup-norm Newton update
  int max_iter = 60;
  double initial_scale = 1.0;  // multiplies the initial guess (1 = matched at the centre)
  Exec exec = Exec::Parallel;
};

struct SphereDiagnostics {
  int iterations = 0;
  double final_update = 0.0;
  double max_residual = 0.0;  // max |det Hess omega - (-omega)^{-d-2}| at nodes >= 2 cells inside
  std::vector<double> update_history;
  std::vector<double> residual_history;  // max |F| of the transformed equation
  double seconds = 0.0;
};

// Exact affine-sphere functions of the built-in cones, valid at any point of Omega*.
class ClosedFormSphere : public ScalarField {
 public:
  explicit ClosedFormSphere(ConeModel cone) : cone_(std::move(cone)) {}
  double value(const Vec& y) const override;
  Vec gradient(const Vec& y) const override;
  Mat hessian(const Vec& y) const override;

 private:
  ConeModel cone_;
};

// Tensor cubic Lagrange interpolation of w = (-omega)^p from solved nodes.
class InterpolatedSphere : public ScalarField {
 public:
  InterpolatedSphere(GridFn w, double p) : w_(std::move(w)), p_(p) {}
  double value(const Vec& y) const override;
  Vec gradient(const Vec& y) const override;
  Mat hessian(const Vec& y) const override;

 private:
  void eval(const Vec& y, double& w, Vec& g, Mat& H) const;
  GridFn w_;
  double p_;
};

struct AffineSphere {
  ConeModel cone;
  GridFn omega;  // convex, negative, zero boundary trace
  std::vector<Vec> grad;
  std::vector<Mat> hess;
  std::vector<double> residual;
  std::vector<double> sigma_density;  // (-omega)^{-d-1}
  SphereDiagnostics diag;
  std::shared_ptr<const ScalarField> field;  // off-grid evaluation of omega

  int d() const { return cone.d(); }
};

// Damped Newton for det Hess omega = (-omega)^{-d-2}, omega = 0 on the boundary,
// written for w = (-omega)^p which is smooth up to the boundary.
AffineSphere solve_affine_sphere(const ConeModel& cone, int n_per_axis, const SphereOptions& opt = {});

// Same container filled from the exact formula (built-in cones).
AffineSphere closed_form_sphere(const ConeModel& cone, int n_per_axis);

// Point of Sigma whose tangent plane is ker(y,-1): (grad omega, grad omega . y - omega).
Vec c_normal(const AffineSphere& sphere, const Vec& y);
Vec c_normal(const ScalarField& omega, const Vec& y);

// Quadrature of (-omega)^{-d-1} over node cells; rejects cells reaching the boundary.
double sigma_volume(const AffineSphere& sphere, const CellSet& cells);

}  // namespace conevex
