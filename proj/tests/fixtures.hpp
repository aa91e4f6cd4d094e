#pragma once

#include "conevex/covolume.hpp"
#include "conevex/invariant.hpp"
#include "conevex/minkowski.hpp"

#include <memory>
#include <random>

namespace fixtures {

using namespace conevex;

inline ConeModel simplicial2() { return ConeModel::simplicial(2); }

inline Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Lattice generated by the ray eigenvalues (2,1,1/2) and (1,2,1/2), coboundary v = (1,0,0).
inline GroupAction lattice_action(const Vec& v = vec3(1, 0, 0), int word_bound = 6) {
  const ConeModel cone = simplicial2();
  std::vector<Mat> gens{diagonal_in_ray_basis(cone, vec3(2, 1, 0.5)), diagonal_in_ray_basis(cone, vec3(1, 2, 0.5))};
  return coboundary_cocycle(cone, gens, v, word_bound);
}

struct Torus {
  std::shared_ptr<const FundamentalDomain> dom;
  std::shared_ptr<const MaximalDomain> dmax;
};

inline Torus make_torus(int n, const Vec& v = vec3(1, 0, 0)) {
  const ConeModel cone = simplicial2();
  const GroupAction act = lattice_action(v);
  return Torus{std::make_shared<FundamentalDomain>(cone, act, n),
               std::make_shared<MaximalDomain>(maximal_domain(act, cone, 33))};
}

// Shared tori; construction is the expensive part of most tests.
inline const Torus& torus32() {
  static const Torus t = make_torus(32);
  return t;
}
inline const Torus& torus64() {
  static const Torus t = make_torus(64);
  return t;
}

// Random smooth tau-body: h = base + amp * sum of low-frequency torus modes, kept
// within the convex range of the Sigma-offset base.
inline TauBody random_body(const Torus& t, std::mt19937_64& rng, double base, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a1 = u(rng), a2 = u(rng), p1 = 3.0 * u(rng), p2 = 3.0 * u(rng);
  std::vector<double> h(t.dom->size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec th = t.dom->theta(i);
    const double tp = 2.0 * 3.14159265358979323846;
    h[i] = base + amp * (a1 * std::cos(tp * th(0) + p1) + a2 * std::cos(tp * th(1) + p2));
  }
  TauBody b = make_tau_body(t.dom, t.dmax, std::move(h));
  restore_convexity(b);
  return b;
}

}  // namespace fixtures
