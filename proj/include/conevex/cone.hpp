#pragma once

#include "conevex/types.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace conevex {

enum class ConeKind { Quadratic, Simplicial };

// A proper open convex cone C in R^{d+1} written as C = {t(x,1) : x in Omega}.
// Omega* is the polar of Omega; covectors of C* are t(y,-1) with y in Omega*.
class ConeModel {
 public:
  static ConeModel quadratic(int d);
  // Rays (a_i, 1) with a_i the unit-circumradius regular simplex centred at 0.
  static ConeModel simplicial(int d);
  // Columns of `rays` span the cone; each is rescaled to last coordinate 1.
  static ConeModel simplicial_from_rays(const Mat& rays);

  ConeKind kind() const { return kind_; }
  int d() const { return d_; }
  int dim() const { return d_ + 1; }

  // Simplicial data: rays as columns (a_i, 1) and the vertex matrix (a_i as columns).
  const Mat& rays() const { return rays_; }
  const Mat& vertices() const { return verts_; }

  bool inside_omega(const Vec& x) const;
  bool inside_omega_star(const Vec& y) const;
  // Euclidean distance to the boundary of Omega* (0 outside).
  double boundary_distance(const Vec& y) const;
  // Distance from y along the unit direction u to the boundary of Omega*.
  double ray_exit(const Vec& y, const Vec& u) const;
  // Minkowski gauge of Omega* (1 on the boundary).
  double gauge_star(const Vec& y) const;
  void bounding_box_star(Vec& lo, Vec& hi) const;
  // Vertices of Omega* (simplicial only).
  std::vector<Vec> star_vertices() const;

  bool in_cone(const Vec& X, double tol = 0.0) const;
  bool in_closed_cone(const Vec& X, double tol) const;
  std::vector<Vec> sample_boundary_rays(int n) const;

  // l_i(y) = 1 - a_i.y, positive on Omega* (simplicial only).
  Vec dual_forms(const Vec& y) const;
  // Coordinates of X in the ray basis (simplicial only).
  Vec ray_coordinates(const Vec& X) const;

  // Exponent p such that (-omega)^p extends smoothly to the boundary.
  double boundary_exponent() const;
  // Affine-sphere scale c: omega = -c * prod(l_i)^{1/(d+1)} (simplicial only).
  double simplicial_sphere_scale() const { return sphere_scale_; }

 private:
  ConeKind kind_ = ConeKind::Quadratic;
  int d_ = 0;
  Mat rays_;
  Mat rays_inv_;
  Mat verts_;
  double sphere_scale_ = 1.0;
};

// An element of the affine group: X -> lin X + tau.
struct GroupElement {
  Mat lin;
  Vec tau;
  std::vector<int> word;  // signed 1-based generator letters
};

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);
GroupElement identity_element(int dim);

class GroupAction {
 public:
  GroupAction() = default;
  GroupAction(const ConeModel& cone, std::vector<GroupElement> generators, int word_bound);

  const std::vector<GroupElement>& generators() const { return gens_; }
  int word_bound() const { return word_bound_; }
  // Breadth-first enumeration up to word_bound; identity first.
  const std::vector<GroupElement>& cached() const { return cache_; }
  bool empty() const { return gens_.empty(); }
  int dim() const { return dim_; }

  // Largest translation mismatch between cached products and their cached representatives.
  double cocycle_defect() const;

  const std::optional<Vec>& coboundary_vector() const { return cobound_; }
  void set_coboundary_vector(const Vec& v) { cobound_ = v; }

 private:
  int dim_ = 0;
  int word_bound_ = 0;
  std::vector<GroupElement> gens_;
  std::vector<GroupElement> cache_;
  std::optional<Vec> cobound_;
};

// Generators with tau(g) = (I - g) v.
GroupAction coboundary_cocycle(const ConeModel& cone, const std::vector<Mat>& generators,
                               const Vec& v, int word_bound);

// Letters are +k (generator k, 1-based) or -k (its inverse).
GroupElement cocycle_extend(const GroupAction& action, const std::vector<int>& word);

// R(g^{-T}(y,-1)).
Vec dual_projective_action(const ConeModel& cone, const Mat& g, const Vec& y);

// Group element acting diagonally on the simplicial rays with the given eigenvalues.
Mat diagonal_in_ray_basis(const ConeModel& cone, const Vec& eigenvalues);

}  // namespace conevex
