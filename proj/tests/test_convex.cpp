#include "conevex/convex.hpp"

#include <doctest.h>

#include <cmath>

using namespace conevex;

namespace {

GridFn box_fn(int n, const std::function<double(const Vec&)>& f) {
  const GridSpec s = GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), n);
  return sample_on(s, std::vector<std::uint8_t>(s.size(), 1), f);
}

}  // namespace

TEST_CASE("Legendre transform of the half square norm is itself on a shared grid") {
  const GridFn f = box_fn(33, [](const Vec& y) { return 0.5 * y.squaredNorm(); });
  const GridFn g = legendre_transform(f, f.spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(g.values[i] - 0.5 * g.spec.node(i).squaredNorm()));
  CHECK(worst < 1e-14);
}

TEST_CASE("serial and parallel transforms agree exactly") {
  const GridFn f = box_fn(41, [](const Vec& y) { return std::cosh(y(0)) + y(1) * y(1) * y(1) * y(1) + 0.3 * y(0) * y(1); });
  const GridSpec t = default_slope_grid(f);
  const GridFn a = legendre_transform(f, t, Exec::Serial);
  const GridFn b = legendre_transform(f, t, Exec::Parallel);
  CHECK(a.values == b.values);
}

TEST_CASE("biconjugate is an involution on convex data up to O(h)") {
  for (int n : {33, 65}) {
    const GridFn f = box_fn(n, [](const Vec& y) { return std::cosh(y(0)) + y(1) * y(1) * y(1) * y(1) + 0.2 * y(0); });
    const GridFn g = biconjugate(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(g.values[i] - f.values[i]));
    const double h = f.spec.hmax();
    MESSAGE("n=" << n << " sup|f**-f|/h = " << worst / h);
    CHECK(worst <= 0.5 * h);
  }
}

TEST_CASE("biconjugate of a double well is a convex minorant touching at the wells") {
  const GridFn f = box_fn(41, [](const Vec& y) {
    const double a = (y(0) - 0.5) * (y(0) - 0.5) + y(1) * y(1);
    const double b = (y(0) + 0.5) * (y(0) + 0.5) + y(1) * y(1);
    return std::min(a, b);
  });
  const GridFn g = biconjugate(f);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g.values[i] <= f.values[i] + 1e-12);
  CHECK(check_discrete_convexity(g, 1e-9));
  std::array<int, 3> m{30, 20, 0};  // y = (0.5, 0)
  CHECK(g.values[f.spec.flat(m)] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lower hull of graph points") {
  SUBCASE("d = 1 reproduces |x|") {
    std::vector<Vec> pts;
    std::vector<double> z;
    for (int i = -10; i <= 10; ++i) {
      pts.push_back(Vec::Constant(1, 0.1 * i));
      z.push_back(std::abs(0.1 * i));
    }
    const PLGraphHull h(pts, z);
    CHECK(h.facets().size() == 2);
    CHECK(h.evaluate(Vec::Constant(1, 0.35)) == doctest::Approx(0.35));
  }
  SUBCASE("d = 2 interpolates convex data at the points") {
    std::vector<Vec> pts;
    std::vector<double> z;
    for (int i = -5; i <= 5; ++i)
      for (int j = -5; j <= 5; ++j) {
        Vec p(2);
        p << 0.2 * i + 0.01 * j, 0.2 * j;
        pts.push_back(p);
        z.push_back(p.squaredNorm());
      }
    const PLGraphHull h(pts, z);
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(h.evaluate(pts[k]) == doctest::Approx(z[k]).epsilon(1e-12));
    Vec mid(2);
    mid << 0.1, 0.1;
    CHECK(h.evaluate(mid) >= mid.squaredNorm());
  }
  SUBCASE("envelope of affine boundary data is affine") {
    std::vector<std::pair<Vec, double>> s;
    for (int k = 0; k < 40; ++k) {
      Vec y(2);
      y << std::cos(0.157 * k), std::sin(0.157 * k);
      s.push_back({y, 0.3 * y(0) - 0.7 * y(1) + 2.0});
    }
    const PLGraphHull e = envelope_from_boundary(s);
    Vec y(2);
    y << 0.1, -0.2;
    CHECK(e.evaluate(y) == doctest::Approx(0.3 * 0.1 + 0.7 * 0.2 + 2.0));
  }
}

TEST_CASE("half-space clipping with edge tags") {
  const Polytope box = box_polytope(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  CHECK(box.volume() == doctest::Approx(4.0));
  Vec e(2);
  e << 1.0, 1.0;
  const Polytope p = clip_halfspaces(box, {e}, {1.0}, {7});
  CHECK(p.volume() == doctest::Approx(3.5));
  double tagged = 0.0;
  for (std::size_t i = 0; i < p.vertices.size(); ++i)
    if (p.edge_tags[i] == 7) tagged += (p.vertices[(i + 1) % p.vertices.size()] - p.vertices[i]).norm();
  CHECK(tagged == doctest::Approx(std::sqrt(2.0)));
  const Polytope none = clip_halfspaces(box, {e}, {-3.0}, {0});
  CHECK(none.empty());
  SUBCASE("intervals") {
    const Polytope seg = box_polytope(Vec::Constant(1, -2.0), Vec::Constant(1, 3.0));
    const Polytope c = clip_halfspaces(seg, {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)}, {1.0, 0.5}, {0, 1});
    CHECK(c.volume() == doctest::Approx(1.5));
  }
}

TEST_CASE("subgradient cell of a kink") {
  const GridSpec s = GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 65);
  GridFn f = sample_on(s, std::vector<std::uint8_t>(s.size(), 1),
                       [](const Vec& y) { return std::abs(y(0)) + std::abs(y(1)); });
  CHECK_THROWS_AS(subgradient_cell(f, 0), ValidationError);
  f.convex = true;
  const Polytope c = subgradient_cell(f, s.flat({32, 32, 0}));
  CHECK(c.volume() == doctest::Approx(4.0).epsilon(1e-12));
  const Polytope flat = subgradient_cell(f, s.flat({40, 40, 0}));
  CHECK(flat.volume() == doctest::Approx(0.0).epsilon(1e-12));
}
