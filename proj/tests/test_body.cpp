#include "conevex/body.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace conevex;

namespace {

// FD Hessians of the sampled support degrade where omega steepens near the boundary.
bool in_collar(const AffineSphere& s, std::size_t i, double cells = 10.0) {
  return s.cone.boundary_distance(s.omega.spec.node(i)) < cells * s.omega.spec.hmax();
}

std::shared_ptr<const AffineSphere> simplicial_sphere(int n) {
  return std::make_shared<AffineSphere>(closed_form_sphere(ConeModel::simplicial(2), n));
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("kink support has a single atom of mass 4") {
  const GridSpec s = GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 41);
  GridFn f = sample_on(s, std::vector<std::uint8_t>(s.size(), 1),
                       [](const Vec& y) { return std::abs(y(0)) + std::abs(y(1)); });
  f.convex = true;
  for (Exec e : {Exec::Serial, Exec::Parallel}) {
    const DiscreteMeasure m = ma_measure(f, e);
    const auto atoms = m.atoms();
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].location.norm() < 1e-15);
    CHECK(std::abs(atoms[0].mass - 4.0) <= 1e-12);
    CHECK(std::abs(m.total() - 4.0) <= 1e-12);
  }
}

TEST_CASE("smooth strictly convex data carries no atoms") {
  const GridSpec s = GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 33);
  GridFn f = sample_on(s, std::vector<std::uint8_t>(s.size(), 1), [](const Vec& y) { return y.squaredNorm(); });
  f.convex = true;
  const DiscreteMeasure m = ma_measure(f);
  CHECK(m.atoms().empty());
  // Lebesgue measure of the gradient image of the interior cells: det Hess = 4 per unit area.
  const CellSet c = masked_cells(f, 2);
  CHECK(m.total(c) == doctest::Approx(4.0 * c.size() * s.cell_volume()).epsilon(1e-12));
}

TEST_CASE("Steiner coefficients") {
  const auto sphere = simplicial_sphere(97);
  Vec c = Vec::Zero(2);
  const CellSet b = disk_cells(sphere->omega, c, 0.2);
  const double vs = sigma_volume(*sphere, b);
  SUBCASE("cone body") {
    const Body k = offset_body(sphere, v3(0.3, -0.1, 0.2), 0.0);
    const SteinerCoeffs sc = steiner_fit(k, default_steiner_nodes(2));
    CHECK(sc.S[0].total(b) == doctest::Approx(vs).epsilon(1e-3));
    CHECK(std::abs(sc.S[1].total(b)) <= 1e-3 * vs);
    CHECK(std::abs(sc.S[2].total(b)) <= 1e-3 * vs);
  }
  SUBCASE("Sigma offset") {
    const Body k = offset_body(sphere, v3(0.3, -0.1, 0.2), 0.5);
    const SteinerCoeffs sc = steiner_fit(k, default_steiner_nodes(2));
    for (int i = 0; i <= 2; ++i) CHECK(sc.S[i].total(b) == doctest::Approx(std::pow(0.5, i) * vs).epsilon(0.02));
    for (double e : {0.15, 0.9}) {
      const double direct = parallel_volume(k, e, b);
      const double exact = vs * (std::pow(0.5 + e, 3) - 0.125) / 3.0;
      CHECK(sc.predict(e, b) == doctest::Approx(direct).epsilon(1e-10));
      CHECK(direct == doctest::Approx(exact).epsilon(0.02));
    }
  }
  SUBCASE("ill-posed node sets are rejected") {
    const Body k = offset_body(sphere, v3(0, 0, 0), 0.5);
    CHECK_THROWS_AS(steiner_fit(k, {0.2, 0.2, 0.4}), ValidationError);
    CHECK_THROWS_AS(steiner_fit(k, {0.2, 0.4}), ValidationError);
  }
}

TEST_CASE("Monte Carlo parallel volume matches the smooth mode") {
  const auto sphere = simplicial_sphere(65);
  const Body k = offset_body(sphere, v3(0, 0, 0), 0.5);
  const CellSet b = disk_cells(sphere->omega, Vec::Zero(2), 0.15);
  const double smooth = parallel_volume(k, 0.2, b);
  const McEstimate mc = parallel_volume_mc(k, 0.2, b, 20000, 11);
  MESSAGE("smooth " << smooth << " mc " << mc.value << " +- " << mc.stderr_ << " failures " << mc.failures);
  CHECK(mc.failures == 0);
  CHECK(std::abs(mc.value - smooth) <= 4.0 * mc.stderr_ + 0.02 * smooth);
}

TEST_CASE("C-curvature and reciprocity") {
  const auto sphere = simplicial_sphere(97);
  SUBCASE("s = omega has unit curvature") {
    const Body k = offset_body(sphere, v3(0, 0, 0), 1.0);
    REQUIRE(k.c2plus);
    const GridFn phi = c_curvature(k);
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (phi.masked(i) && !in_collar(*sphere, i)) CHECK(std::abs(phi.values[i] - 1.0) <= 1e-3);
  }
  SUBCASE("area density times curvature is the Sigma density") {
    GridFn s = sphere->omega;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.masked(i)) s.values[i] = 0.5 * s.values[i] + 0.2 * s.spec.node(i).squaredNorm();
    const Body k = make_body(s, sphere);
    REQUIRE(k.c2plus);
    const GridFn phi = c_curvature(k);
    const DiscreteMeasure a = area_measure(k);
    int checked = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (!phi.masked(i) || in_collar(*sphere, i)) continue;
      CHECK(a.density(i) * phi.values[i] == doctest::Approx(sphere->sigma_density[i]).epsilon(0.02));
      ++checked;
    }
    CHECK(checked > 500);
  }
  SUBCASE("cone bodies are not C2-plus") {
    const Body k = offset_body(sphere, v3(0, 0, 0), 0.0);
    CHECK_FALSE(k.c2plus);
    CHECK_THROWS_AS(c_curvature(k), ValidationError);
  }
}

TEST_CASE("radii of a Sigma offset") {
  const auto sphere = simplicial_sphere(49);
  const Body k = offset_body(sphere, v3(0.1, 0, 0), 0.5);
  const Radii r = shape_operator_radii(k);
  for (std::size_t i : measurable_cells(k)) {
    if (in_collar(*sphere, i)) continue;
    CHECK(r.radii[i](0) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.sigma[i](2) == doctest::Approx(0.25).epsilon(2e-3));
  }
}

TEST_CASE("curvature conversion") {
  CHECK(curvature_conversion(2.0, 2) == std::pow(2.0, 1.5));
  CHECK(curvature_conversion(1.0, 3) == 1.0);
  CHECK_THROWS_AS(curvature_conversion(0.0, 2), ValidationError);
}

TEST_CASE("serial and parallel measures agree") {
  const auto sphere = simplicial_sphere(49);
  const Body k = offset_body(sphere, v3(0, 0.2, 0), 0.5);
  CHECK(area_measure(k, Exec::Serial).mass == area_measure(k, Exec::Parallel).mass);
  CHECK(parallel_volume(k, 0.3, Exec::Serial).mass == parallel_volume(k, 0.3, Exec::Parallel).mass);
}

TEST_CASE("body validation") {
  const auto sphere = simplicial_sphere(33);
  GridFn s = sphere->omega;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.masked(i)) s.values[i] = -s.values[i];
  CHECK_THROWS_AS(make_body(s, sphere), ValidationError);
  CHECK_THROWS_AS(offset_body(sphere, v3(0, 0, 0), -1.0), ValidationError);
}
