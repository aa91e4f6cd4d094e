#pragma once

#include "conevex/grid.hpp"
#include "conevex/types.hpp"

#include <vector>

namespace conevex {

// Convex polytope in R^d, d in {1,2}: an interval or a counter-clockwise polygon.
struct Polytope {
  int d = 0;
  std::vector<Vec> vertices;

  bool empty() const { return vertices.empty(); }
  double volume() const;
  double diameter() const;
  bool contains(const Vec& p, double tol) const;
  // Length of the edge lying on constraint `tag` (d=2) or 1 for an active endpoint (d=1).
  std::vector<int> edge_tags;
};

// Half-space intersection {p : p.e_k <= b_k} starting from `start`.
// Tags identify which constraint produced each polygon edge.
Polytope clip_halfspaces(Polytope start, const std::vector<Vec>& e, const std::vector<double>& b,
                         const std::vector<int>& tags);
Polytope box_polytope(const Vec& lo, const Vec& hi);

// Brute-force conjugate g(p) = max_x (x.p - f(x)) over masked x; ties go to the lowest index.
GridFn legendre_transform(const GridFn& f, const GridSpec& target, Exec exec = Exec::Parallel);
// Slope box of f plus one target cell of margin, same node counts as f.
GridSpec default_slope_grid(const GridFn& f);
GridFn biconjugate(const GridFn& f, Exec exec = Exec::Parallel);

// Slopes p with f(y)+p.(x-y) <= f(x) for all masked x in the radius-r box around the node.
Polytope subgradient_cell(const GridFn& f, std::size_t node, int radius = 2);

// Lower convex hull of scattered graph points over R^d, d in {1,2}.
class PLGraphHull {
 public:
  struct Facet {
    Vec slope;
    double offset = 0.0;  // z = slope.y + offset
    std::vector<int> vertices;
  };

  PLGraphHull() = default;
  PLGraphHull(std::vector<Vec> points, std::vector<double> heights);

  int d() const { return d_; }
  const std::vector<Vec>& points() const { return pts_; }
  const std::vector<double>& heights() const { return z_; }
  const std::vector<Facet>& facets() const { return facets_; }
  // Maximum of the facet affine functions (exact inside the hull of the points).
  double evaluate(const Vec& y) const;
  Vec slope_at(const Vec& y) const;

 private:
  int d_ = 0;
  std::vector<Vec> pts_;
  std::vector<double> z_;
  std::vector<Facet> facets_;
};

PLGraphHull envelope_from_boundary(const std::vector<std::pair<Vec, double>>& samples);

}  // namespace conevex
