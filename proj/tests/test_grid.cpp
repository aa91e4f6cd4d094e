#include "conevex/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace conevex;

namespace {

GridFn box_fn(int n, const std::function<double(const Vec&)>& f) {
  const GridSpec s = GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), n);
  return sample_on(s, std::vector<std::uint8_t>(s.size(), 1), f);
}

}  // namespace

TEST_CASE("flat and multi indices round trip") {
  const GridSpec s = GridSpec::box(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0), 7);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.flat(s.multi(i)) == i);
  std::size_t out = 0;
  CHECK_FALSE(s.offset(0, {-1, 0, 0}, out));
  CHECK(s.offset(0, {1, 2, 0}, out));
  CHECK(out == s.flat({1, 2, 0}));
}

TEST_CASE("bilinear interpolation") {
  const GridFn f = box_fn(21, [](const Vec& y) { return 2.0 * y(0) - y(1) + 0.5; });
  Vec y(2);
  y << 0.123, -0.456;
  double v = 0.0, err = 0.0;
  REQUIRE(f.bilinear(y, v, &err));
  CHECK(v == doctest::Approx(2.0 * 0.123 + 0.456 + 0.5));
  SUBCASE("error bound dominates the true error on a quadratic") {
    const GridFn q = box_fn(21, [](const Vec& p) { return p.squaredNorm() + p(0) * p(1); });
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int k = 0; k < 200; ++k) {
      Vec p(2);
      p << u(rng), u(rng);
      double val = 0.0, bound = 0.0;
      REQUIRE(q.bilinear(p, val, &bound));
      CHECK(std::abs(val - (p.squaredNorm() + p(0) * p(1))) <= bound + 1e-15);
    }
  }
}

TEST_CASE("finite differences are exact on cubic polynomials") {
  const GridFn f = box_fn(17, [](const Vec& y) { return y(0) * y(0) * y(0) + 2.0 * y(0) * y(1) * y(1) - y(1); });
  const std::size_t i = f.spec.flat({8, 5, 0});
  const Vec y = f.spec.node(i);
  Mat H;
  Vec g;
  REQUIRE(hessian_fd(f, i, H));
  REQUIRE(gradient_fd(f, i, g));
  CHECK(H(0, 0) == doctest::Approx(6.0 * y(0)));
  CHECK(H(0, 1) == doctest::Approx(4.0 * y(1)));
  CHECK(H(1, 1) == doctest::Approx(4.0 * y(0)));
  CHECK(g(0) == doctest::Approx(3.0 * y(0) * y(0) + 2.0 * y(1) * y(1)));
  CHECK(g(1) == doctest::Approx(4.0 * y(0) * y(1) - 1.0));
}

TEST_CASE("discrete convexity") {
  CHECK(check_discrete_convexity(box_fn(15, [](const Vec& y) { return y.squaredNorm(); })));
  CHECK_FALSE(check_discrete_convexity(box_fn(15, [](const Vec& y) { return -y.squaredNorm(); })));
}

TEST_CASE("Omega* sampling masks the exterior") {
  const ConeModel cone = ConeModel::quadratic(2);
  const GridFn f = sample_omega_star(cone, 33, [](const Vec& y) { return y(0); });
  std::size_t inside = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(bool(f.mask[i]) == cone.inside_omega_star(f.spec.node(i)));
    inside += f.mask[i];
  }
  // Area of the unit disk in cells.
  CHECK(static_cast<double>(inside) * f.spec.cell_volume() == doctest::Approx(std::acos(-1.0)).epsilon(0.05));
  for (std::size_t i : masked_cells(f, 2)) CHECK(f.interior(i, 2));
}
