// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion; exit status
// is nonzero when any criterion fails.

#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

using namespace conevex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool in_collar(const AffineSphere& s, std::size_t i, double cells) {
  return s.cone.boundary_distance(s.omega.spec.node(i)) < cells * s.omega.spec.hmax();
}

Outcome sphere_quadratic() {
  const auto t0 = Clock::now();
  SphereOptions opt;
  opt.initial_scale = 0.7;  // start away from the exact profile
  const AffineSphere s = solve_affine_sphere(ConeModel::quadratic(2), 129, opt);
  const double secs = seconds_since(t0);
  double err = 0.0;
  for (std::size_t i : masked_cells(s.omega, 2)) {
    const Vec y = s.omega.spec.node(i);
    err = std::max(err, std::abs(s.omega.values[i] + std::sqrt(1.0 - y.squaredNorm())));
  }
  return {err <= 2e-3 && secs <= 60.0, fmt("max error %.3g (<= 2e-3), %.2f s (<= 60 s), %g Newton steps", err, secs,
                                            s.diag.iterations)};
}

Outcome sphere_simplicial() {
  const ConeModel cone = ConeModel::simplicial(2);
  const AffineSphere s = solve_affine_sphere(cone, 97);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i : masked_cells(s.omega, 2)) {
    const Vec y = s.omega.spec.node(i);
    if (cone.boundary_distance(y) < 2.0 * s.omega.spec.hmax()) continue;
    const double p = cone.ray_coordinates(c_normal(s, y)).prod();
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  const double spread = (hi - lo) / (0.5 * (hi + lo));
  return {spread <= 1e-2, fmt("relative spread %.3g (<= 1e-2)", spread)};
}

Outcome steiner() {
  const auto sphere = std::make_shared<const AffineSphere>(closed_form_sphere(ConeModel::simplicial(2), 97));
  const CellSet b = disk_cells(sphere->omega, Vec::Zero(2), 0.2);
  const double vs = sigma_volume(*sphere, b);
  const std::vector<double> nodes = default_steiner_nodes(2);

  const SteinerCoeffs cone = steiner_fit(offset_body(sphere, fixtures::vec3(0.3, -0.1, 0.2), 0.0), nodes);
  const double c1 = std::abs(cone.S[1].total(b)) / vs, c2 = std::abs(cone.S[2].total(b)) / vs;
  bool ok = c1 <= 1e-3 && c2 <= 1e-3;

  const Body k = offset_body(sphere, fixtures::vec3(0.3, -0.1, 0.2), 0.5);
  const SteinerCoeffs off = steiner_fit(k, nodes);
  double worst = 0.0;
  for (int i = 0; i <= 2; ++i) worst = std::max(worst, std::abs(off.S[i].total(b) / (std::pow(0.5, i) * vs) - 1.0));
  ok = ok && worst <= 0.02;
  // Held-out radii: the fitted polynomial against the closed form, with the per-coefficient tolerance summed.
  double pred = 0.0;
  for (double e : {0.15, 0.9}) {
    const double exact = vs * (std::pow(0.5 + e, 3) - 0.125) / 3.0;
    double tol = 0.0;
    for (int i = 0; i <= 2; ++i) {
      const double binom = i == 0 ? 1.0 : 3.0;  // binomial(3, i), i <= 2
      tol += 0.02 * binom * std::pow(e, 3 - i) * std::pow(0.5, i) * vs / 3.0;
    }
    const double r = std::abs(off.predict(e, b) - exact) / tol;
    pred = std::max(pred, r);
  }
  ok = ok && pred <= 1.0;
  return {ok, fmt("cone |S1|,|S2| = %.2g, %.2g vol (<= 1e-3); offset S_i rel err %.3g (<= 0.02); held-out %.2g of tol",
                  c1, c2, worst, pred)};
}

Outcome kink() {
  const GridSpec s = GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 65);
  GridFn f = sample_on(s, std::vector<std::uint8_t>(s.size(), 1),
                       [](const Vec& y) { return std::abs(y(0)) + std::abs(y(1)); });
  f.convex = true;
  const auto atoms = ma_measure(f).atoms();
  const bool one = atoms.size() == 1 && atoms[0].location.norm() == 0.0;
  const double err = one ? std::abs(atoms[0].mass - 4.0) : 1.0;
  return {one && err <= 1e-12, fmt("%g atom(s), |mass - 4| = %.3g (<= 1e-12)", static_cast<double>(atoms.size()), err)};
}

Outcome reciprocity() {
  const auto sphere = std::make_shared<const AffineSphere>(closed_form_sphere(ConeModel::simplicial(2), 97));
  const double collar = 10.0;
  const GridFn phi1 = c_curvature(offset_body(sphere, Vec::Zero(3), 1.0));
  double e1 = 0.0;
  for (std::size_t i = 0; i < phi1.size(); ++i)
    if (phi1.masked(i) && !in_collar(*sphere, i, collar)) e1 = std::max(e1, std::abs(phi1.values[i] - 1.0));

  GridFn s = sphere->omega;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.masked(i)) s.values[i] = 0.5 * s.values[i] + 0.2 * s.spec.node(i).squaredNorm();
  const Body k = make_body(s, sphere);
  const GridFn phi = c_curvature(k);
  const DiscreteMeasure a = area_measure(k);
  double e2 = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (phi.masked(i) && !in_collar(*sphere, i, collar))
      e2 = std::max(e2, std::abs(a.density(i) * phi.values[i] / sphere->sigma_density[i] - 1.0));
  return {e2 <= 0.02 && e1 <= 1e-3,
          fmt("density*phi/sigma rel err %.3g (<= 0.02); |phi(omega) - 1| %.3g (<= 1e-3); collar %g cells", e2, e1,
              collar)};
}

Outcome conversion() {
  const double v = curvature_conversion(2.0, 2);
  const double err = std::abs(v - std::pow(2.0, 1.5));
  return {err <= 4.0 * std::numeric_limits<double>::epsilon(), fmt("kappa=2, d=2 -> %.17g, error %.3g", v, err)};
}

Outcome covolume_closed_form() {
  const auto& t = fixtures::torus64();
  const TauBody k = sigma_offset(t.dom, t.dmax, 0.5);
  const double exact = 0.125 / 3.0 * t.dom->sigma_volume();
  const double v = covolume(k).value;
  const CovolumeMc mc = covolume_mc(k, t.dom->y(t.dom->size() / 2 + 32), 200000, 17);
  const double rel = std::abs(v / exact - 1.0);
  const double z = std::abs(mc.value - exact) / mc.stderr_;
  return {rel <= 0.02 && z <= 3.0 && mc.escapes == 0,
          fmt("covol %.6g vs %.6g (rel %.2g <= 0.02); MC %.3g SE away (<= 3)", v, exact, rel, z)};
}

Outcome convexity() {
  const auto& t32 = fixtures::torus32();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const TauBody a = fixtures::random_body(t32, rng, 0.3 + 0.4 * u(rng), 0.002);
    const TauBody b = fixtures::random_body(t32, rng, 0.3 + 0.4 * u(rng), 0.002);
    worst = std::min(worst, convexity_gap(a, b, 0.1 + 0.8 * u(rng)) / t32.dom->sigma_volume());
  }
  const auto& t = fixtures::torus64();
  const double F = t.dom->sigma_volume();
  const double gap = convexity_gap(sigma_offset(t.dom, t.dmax, 0.3), sigma_offset(t.dom, t.dmax, 0.7), 0.5) / F;
  // (0.3^3 + 0.7^3)/2 - 0.5^3 = 0.06, divided by d+1 = 3 in the covolume normalisation t^{d+1} vol(F)/(d+1).
  const double derived = 0.06 / 3.0;
  const double rel = std::abs(gap / derived - 1.0);
  std::printf("info: 0.3/0.7 gap = %.6f vol(F); against the literal 0.06 vol(F) the ratio is %.4f\n", gap, gap / 0.06);
  return {worst >= -1e-12 && rel <= 0.05,
          fmt("min random gap %.3g vol(F) (>= -1e-12); strict gap %.6f vol(F) vs %.4f (rel %.2g <= 0.05)", worst, gap,
              derived, rel)};
}

Outcome gateaux() {
  const auto& t = fixtures::torus64();
  std::vector<double> f = torus_bump(*t.dom, Vec::Zero(2), 0.5);
  for (double& v : f) v *= 0.1;
  std::vector<double> ts;
  for (double s = 1e-2; s > 1e-4; s *= 0.5) ts.push_back(s);
  const GateauxReport r = gateaux_check(sigma_offset(t.dom, t.dmax, 0.5), f, ts);
  // Monotone improvement until the error stops decreasing; the stall must sit at the quadrature floor.
  const double floor = 1e-3;
  std::size_t k = 1;
  while (k < ts.size() && r.rel_error[k] < r.rel_error[k - 1]) ++k;
  const bool monotone = k == ts.size() || r.rel_error[k - 1] <= floor;
  std::string errs;
  for (double e : r.rel_error) errs += fmt("%.2g ", e);
  return {r.rel_error[0] <= 0.05 && monotone && !r.escaped,
          "rel errors " + errs + fmt("(t=1e-2 <= 0.05, monotone to floor %.0e)", floor)};
}

Outcome minkowski() {
  const auto& t = fixtures::torus64();
  const std::vector<double> mu = sigma_offset_measure(*t.dom, 0.5);
  // Grid tolerance: the h-error implied by the discrete area defect of the exact offset (A ~ h^d).
  const TorusArea exact_area = torus_area(sigma_offset(t.dom, t.dmax, 0.5));
  double grid_tol = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    grid_tol = std::max(grid_tol, 0.5 / t.dom->d() * std::abs(exact_area.mass[j] / mu[j] - 1.0));
  grid_tol = std::max(grid_tol, 1e-6);

  auto run = [&](const std::vector<double>& m, double init) {
    MinkowskiProblem p{t.dom, t.dmax, m, {}};
    p.config.initial_offset = init;
    return solve_minkowski(p);
  };
  auto sup_err = [](const std::vector<double>& h, double target) {
    double e = 0.0;
    for (double v : h) e = std::max(e, std::abs(v - target));
    return e;
  };
  auto nonincreasing = [](const SolveTrace& tr) {
    for (std::size_t k = 1; k < tr.rows.size(); ++k)
      if (tr.rows[k].L > tr.rows[k - 1].L + 1e-15 * std::abs(tr.rows[k - 1].L)) return false;
    return true;
  };
  const MinkowskiResult zero = run(std::vector<double>(mu.size(), 0.0), -1.0);
  const MinkowskiResult a = run(mu, 1.0);
  const MinkowskiResult b = run(mu, 0.0);
  const double e0 = sup_err(zero.body.h, 0.0);
  const double ea = sup_err(a.body.h, 0.5), eb = sup_err(b.body.h, 0.5);
  const double agree = hausdorff_distance(a.body, b.body);
  const bool ok = zero.trace.converged && a.trace.converged && b.trace.converged && e0 <= grid_tol &&
                  std::max(ea, eb) <= 5e-2 && nonincreasing(a.trace) && nonincreasing(b.trace) &&
                  agree <= 2.0 * grid_tol;
  return {ok, fmt("mu=0 err %.2g (<= grid tol %.2g); offset err %.3g / %.3g (<= 5e-2); ", e0, grid_tol, ea, eb) +
                  fmt("inits agree %.2g (<= 2 x grid tol)", agree)};
}

Outcome invariance() {
  const auto& t = fixtures::torus64();
  const ConeModel& cone = t.dom->cone();
  const GroupAction& act = t.dom->action();
  const GridFn s = sample_omega_star(cone, 193, [&](const Vec& y) { return t.dmax->value(y) + 0.5 * t.dom->sphere().value(y); });
  const EquivarianceReport eq = equivariance_residual(s, act, cone, t.dom->sphere(), 2000, 5);
  const bool eq_ok = eq.max_excess <= 1e-6;

  const auto sphere = std::make_shared<const AffineSphere>(closed_form_sphere(cone, 193));
  const Body b = offset_body(sphere, *act.coboundary_vector(), 0.5);
  const DiscreteMeasure A = area_measure(b);
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    Vec c = Vec::Zero(2);
    c(0) = 0.02 * k;
    CellSet cells;
    for (std::size_t i : disk_cells(b.support, c, 0.06))
      if (A.defined[i]) cells.push_back(i);
    const double a0 = A.total(cells);
    worst = std::max(worst, std::abs(area_of_image(A, cone, act.cached()[k].lin, cells) / a0 - 1.0));
  }
  const CoveringReport cov =
      dirichlet_lee_covering(*t.dom, *t.dmax, t.dom->y(t.dom->size() / 2 + 32), 10000, 0.05, 2.0, 7);
  return {eq_ok && worst <= 0.02 && cov.fraction() >= 0.99 && act.word_bound() == 6,
          fmt("equivariance defect %.2g, interp bound %.2g, excess %.2g; area rel %.3g (<= 0.02); ", eq.max_defect,
              eq.max_interp_bound, eq.max_excess, worst) +
              fmt("DL covering %.4f (>= 0.99)", cov.fraction())};
}

}  // namespace

int main() {
  configure_threads_from_env();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"affine sphere, quadratic", sphere_quadratic},
      {"affine sphere, simplicial", sphere_simplicial},
      {"Steiner formula", steiner},
      {"MA measure of a kink", kink},
      {"area/curvature reciprocity", reciprocity},
      {"curvature conversion", conversion},
      {"covolume closed form", covolume_closed_form},
      {"covolume convexity", convexity},
      {"Gateaux identity", gateaux},
      {"Minkowski roundtrip", minkowski},
      {"invariance suite", invariance},
  };
  int failed = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = checks[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, checks[k].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
