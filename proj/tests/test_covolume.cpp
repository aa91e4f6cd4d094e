#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace conevex;
using fixtures::torus32;

namespace {

// Covolume of D_tau + t Sigma by homogeneity: vol_Sigma(F) t^{d+1} / (d+1), d = 2.
double offset_covolume(const FundamentalDomain& dom, double t) { return dom.sigma_volume() * t * t * t / 3.0; }

}  // namespace

TEST_CASE("covolume of the maximal domain vanishes") {
  const auto& t = torus32();
  const CovolumeReport r = covolume(sigma_offset(t.dom, t.dmax, 0.0));
  CHECK(r.value == 0.0);
  CHECK(r.path_samples == 8);
}

TEST_CASE("covolume of Sigma offsets") {
  const auto& t = torus32();
  for (double s : {0.25, 0.5, 1.0, 2.0}) {
    const CovolumeReport r = covolume(sigma_offset(t.dom, t.dmax, s));
    CHECK(r.value == doctest::Approx(offset_covolume(*t.dom, s)).epsilon(1e-3));
    CHECK(r.restored_nodes == 0);
  }
}

TEST_CASE("path quadrature equals the homogeneous form") {
  const auto& t = torus32();
  std::mt19937_64 rng(21);
  for (int k = 0; k < 3; ++k) {
    const TauBody b = fixtures::random_body(t, rng, 0.5, 0.002);
    const TorusArea a = torus_area(b);
    double s = 0.0;
    for (std::size_t j = 0; j < b.h.size(); ++j) s += b.h[j] * a.mass[j];
    CHECK(covolume(b).value == doctest::Approx(s / 3.0).epsilon(1e-10));
    CHECK(covolume(b, 3).value == doctest::Approx(s / 3.0).epsilon(1e-10));
  }
}

TEST_CASE("covolume does not depend on the coboundary vector") {
  const fixtures::Torus shifted = fixtures::make_torus(32, fixtures::vec3(0.2, -0.5, 0.1));
  const auto& t = torus32();
  const double a = covolume(sigma_offset(t.dom, t.dmax, 0.5)).value;
  const double b = covolume(sigma_offset(shifted.dom, shifted.dmax, 0.5)).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("convexity gap") {
  const auto& t = torus32();
  const TauBody k0 = sigma_offset(t.dom, t.dmax, 0.3);
  const TauBody k1 = sigma_offset(t.dom, t.dmax, 0.7);
  SUBCASE("equal bodies") { CHECK(std::abs(convexity_gap(k0, k0, 0.5)) < 1e-15); }
  SUBCASE("nested Sigma offsets") {
    const double F = t.dom->sigma_volume();
    const double expect = 0.5 * offset_covolume(*t.dom, 0.3) + 0.5 * offset_covolume(*t.dom, 0.7) - offset_covolume(*t.dom, 0.5);
    CHECK(expect == doctest::Approx(0.02 * F));
    CHECK(convexity_gap(k0, k1, 0.5) == doctest::Approx(expect).epsilon(5e-3));
  }
  SUBCASE("random pairs") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      const TauBody a = fixtures::random_body(t, rng, 0.3 + 0.4 * u(rng), 0.002);
      const TauBody b = fixtures::random_body(t, rng, 0.3 + 0.4 * u(rng), 0.002);
      CHECK(convexity_gap(a, b, u(rng)) >= -1e-12);
    }
  }
}

TEST_CASE("sandwich bounds on nested pairs") {
  const auto& t = torus32();
  std::mt19937_64 rng(13);
  for (int k = 0; k < 5; ++k) {
    const TauBody a = fixtures::random_body(t, rng, 0.4, 0.002);
    std::vector<double> h = a.h;
    for (double& v : h) v += 0.05;
    const TauBody b = make_tau_body(t.dom, t.dmax, h);
    const SandwichReport r = covolume_sandwich(a, b);
    CHECK(r.lower <= r.difference);
    CHECK(r.difference <= r.upper);
  }
  CHECK_THROWS_AS(covolume_sandwich(sigma_offset(t.dom, t.dmax, 0.5), sigma_offset(t.dom, t.dmax, 0.4)), ValidationError);
}

TEST_CASE("Gateaux derivative is the area measure") {
  const auto& t = torus32();
  const std::vector<double> ts{1e-2, 5e-3, 2.5e-3};
  SUBCASE("uniform direction on a Sigma offset") {
    const std::vector<double> one(t.dom->size(), 1.0);
    const GateauxReport r = gateaux_check(sigma_offset(t.dom, t.dmax, 0.5), one, ts);
    CHECK(r.central);
    CHECK(r.target == doctest::Approx(0.25 * t.dom->sigma_volume()).epsilon(1e-3));
    // Exact cubic: the central quotient is off by t^2 vol/3.
    for (std::size_t k = 0; k < ts.size(); ++k) CHECK(r.rel_error[k] < 1e-3);
  }
  SUBCASE("bump on a Sigma offset converges") {
    std::vector<double> f = torus_bump(*t.dom, Vec::Zero(2), 0.5);
    for (double& v : f) v *= 0.1;
    const GateauxReport r = gateaux_check(sigma_offset(t.dom, t.dmax, 0.5), f, ts);
    CHECK(r.rel_error[0] < 0.05);
    CHECK(r.rel_error[1] < r.rel_error[0]);
  }
  SUBCASE("derivative at the maximal domain is zero") {
    // Constant directions keep the perturbed bodies Sigma offsets.
    const std::vector<double> one(t.dom->size(), 1.0);
    const GateauxReport r = gateaux_check(sigma_offset(t.dom, t.dmax, 0.0), one, ts);
    CHECK_FALSE(r.central);
    CHECK(std::abs(r.target) < 1e-20);
    for (std::size_t k = 0; k < ts.size(); ++k)
      CHECK(r.quotient[k] == doctest::Approx(t.dom->sigma_volume() * ts[k] * ts[k] / 3.0).epsilon(1e-3));
  }
}

TEST_CASE("torus bump") {
  const auto& t = torus32();
  const std::vector<double> f = torus_bump(*t.dom, Vec::Zero(2), 0.25);
  double mx = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i] >= 0.0);
    CHECK(f[i] <= 1.0);
    mx = std::max(mx, f[i]);
    if (t.dom->theta(i).cwiseAbs().maxCoeff() > 0.25 * std::sqrt(2.0)) CHECK(f[i] == 0.0);
  }
  CHECK(mx > 0.95);
}

TEST_CASE("Monte Carlo covolume") {
  const auto& t = torus32();
  const TauBody b = sigma_offset(t.dom, t.dmax, 0.5);
  const Vec y0 = t.dom->y(t.dom->size() / 2 + 16);
  const CovolumeMc mc = covolume_mc(b, y0, 20000, 5);
  const double exact = offset_covolume(*t.dom, 0.5);
  MESSAGE("mc " << mc.value << " +- " << mc.stderr_ << " exact " << exact);
  CHECK(mc.escapes == 0);
  CHECK(mc.word_bound == 6);
  CHECK(std::abs(mc.value - exact) <= 4.0 * mc.stderr_);
  CHECK(covolume_mc(b, y0, 2000, 5, Exec::Serial).value == covolume_mc(b, y0, 2000, 5, Exec::Parallel).value);
}
