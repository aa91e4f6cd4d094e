#include "conevex/io.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace conevex;
using nlohmann::json;

TEST_CASE("instance JSON round trip") {
  const ConeModel cone = fixtures::simplicial2();
  const GroupAction act = fixtures::lattice_action();
  const json j = instance_to_json(cone, act.generators(), 6, fixtures::vec3(1, 0, 0));
  const Instance a = instance_from_json(j);
  const Instance b = instance_from_json(json::parse(j.dump()));
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(a.word_bound == 6);
  REQUIRE(a.coboundary.has_value());
  CHECK((*a.coboundary - fixtures::vec3(1, 0, 0)).norm() == 0.0);
  REQUIRE(a.generators.size() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK((a.generators[k].lin - act.generators()[k].lin).norm() == 0.0);
    CHECK((a.generators[k].tau - act.generators()[k].tau).norm() == 0.0);
  }
  CHECK((a.cone.vertices() - cone.vertices()).norm() < 1e-14);
  CHECK(a.action().cached().size() == act.cached().size());
}

TEST_CASE("hash follows content") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  json j = instance_to_json(ConeModel::quadratic(2), {}, 0, std::nullopt);
  const std::string h0 = instance_from_json(j).hash();
  j["cone"]["d"] = 3;
  CHECK(instance_from_json(j).hash() != h0);
}

TEST_CASE("malformed instances are rejected") {
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"cone":{"kind":"cubic","d":2}})")), ValidationError);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"cone":{"kind":"quadratic","d":7}})")), ValidationError);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"cone":{"d":2}})")), ValidationError);
  json j = instance_to_json(fixtures::simplicial2(), fixtures::lattice_action().generators(), 6, fixtures::vec3(1, 0, 0));
  j["group"]["coboundary"] = {0.0, 1.0, 0.0};
  CHECK_THROWS_AS(instance_from_json(j), ValidationError);
  j["group"]["word_bound"] = -1;
  CHECK_THROWS_AS(instance_from_json(j), ValidationError);
  CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), ValidationError);
}

TEST_CASE("17 significant digits round trip") {
  for (double x : {0.1, 1.0 / 3.0, -2.718281828459045, 1e-300, 6.02214076e23})
    CHECK(std::stod(fmt17(x)) == x);
}

TEST_CASE("grid CSV round trip") {
  const ConeModel cone = ConeModel::quadratic(2);
  const GridFn f = sample_omega_star(cone, 17, [](const Vec& y) { return std::exp(y(0)) / 3.0 - y(1); });
  const std::string text = grid_csv(f, json{{"seed", 1}});
  CHECK(text.rfind("{", 0) == 0);
  const GridFn g = parse_grid_csv(text);
  CHECK(g.spec.same_as(f.spec));
  CHECK(g.mask == f.mask);
  CHECK(g.values == f.values);
  CHECK_THROWS_AS(parse_grid_csv("{}\nbox,1\n"), ValidationError);
}

TEST_CASE("torus CSV round trip") {
  const auto& t = fixtures::torus32();
  std::vector<TorusRow> rows;
  for (std::size_t i = 0; i < t.dom->size(); ++i) {
    const Vec th = t.dom->theta(i), y = t.dom->y(i);
    rows.push_back({{th(0), th(1)}, {y(0), y(1)}, 0.5 + 1e-3 * std::sin(static_cast<double>(i))});
  }
  int n = 0;
  const std::vector<double> h = parse_torus_csv(torus_csv(rows, 32, json::object()), &n);
  CHECK(n == 32);
  REQUIRE(h.size() == rows.size());
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == rows[i].h);
}

TEST_CASE("measure CSV") {
  const std::vector<double> mass{0.0, 1.0 / 7.0, 4.0};
  const std::vector<double> dens{0.0, 1.0, 2.0};
  const std::vector<std::uint8_t> atom{0, 0, 1};
  CHECK(parse_measure_csv(measure_csv(mass, dens, atom, json::object())) == mass);
  CHECK_THROWS_AS(parse_measure_csv("{}\ncell,density,atom,mass\n0,0,0,-1\n"), ValidationError);
  CHECK_THROWS_AS(parse_measure_csv("{}\ncell,density,atom,mass\n0,0,0,abc\n"), ValidationError);
}

TEST_CASE("list parsing") {
  CHECK(parse_list("1,0.5,-2") == std::vector<double>{1.0, 0.5, -2.0});
  CHECK_THROWS_AS(parse_list("1,x"), ValidationError);
}
