#pragma once

#include "conevex/cone.hpp"
#include "conevex/types.hpp"

#include <array>
#include <functional>
#include <vector>

namespace conevex {

// Structured grid, nodes at lo + i*h along each axis, axis 0 fastest.
struct GridSpec {
  int d = 0;
  std::vector<int> n;
  Vec lo;
  Vec hi;
  bool periodic = false;

  static GridSpec box(const Vec& lo, const Vec& hi, int n_per_axis);
  static GridSpec omega_star(const ConeModel& cone, int n_per_axis);

  double h(int axis) const { return (hi(axis) - lo(axis)) / (n[axis] - 1); }
  double hmax() const;
  double cell_volume() const;
  std::size_t size() const;
  Vec node(std::size_t idx) const;
  std::array<int, 3> multi(std::size_t idx) const;
  std::size_t flat(const std::array<int, 3>& m) const;
  // Neighbour at integer offset; false when it leaves a non-periodic grid.
  bool offset(std::size_t idx, const std::array<int, 3>& off, std::size_t& out) const;
  bool same_as(const GridSpec& o) const;
};

using CellSet = std::vector<std::size_t>;

class GridFn {
 public:
  GridSpec spec;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  bool convex = false;

  GridFn() = default;
  explicit GridFn(GridSpec s);

  std::size_t size() const { return values.size(); }
  bool masked(std::size_t i) const { return mask[i] != 0; }
  // True when every node of the (2r+1)^d box around idx exists and is masked.
  bool interior(std::size_t idx, int radius) const;

  // Multilinear interpolation; false when a corner is missing or unmasked.
  bool bilinear(const Vec& y, double& value, double* error_bound = nullptr) const;
};

// Samples f on the masked nodes (inside Omega*, boundary distance > 0).
GridFn sample_omega_star(const ConeModel& cone, int n_per_axis, const std::function<double(const Vec&)>& f);
GridFn sample_on(const GridSpec& spec, const std::vector<std::uint8_t>& mask,
                 const std::function<double(const Vec&)>& f);

// Midpoint convexity along axes and diagonals within tol*(1+|values|).
bool check_discrete_convexity(const GridFn& f, double tol = 1e-9);

// Centered differences: fourth order where the radius-2 stencil is masked,
// second order where only radius 1 is; false otherwise.
bool gradient_fd(const GridFn& f, std::size_t idx, Vec& g);
bool hessian_fd(const GridFn& f, std::size_t idx, Mat& H);

CellSet disk_cells(const GridFn& f, const Vec& center, double radius);
CellSet masked_cells(const GridFn& f, int radius);

}  // namespace conevex
