#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "skirmish/config.hpp"
#include "skirmish/geom.hpp"
#include "skirmish/rng.hpp"

using namespace skirmish;

TEST_CASE("ray-rect first hit", "[core]") {
  Rect r{{100.0, -50.0}, {200.0, 50.0}};
  auto t = ray_rect_first_hit({0.0, 0.0}, {1.0, 0.0}, r);
  REQUIRE(t.has_value());
  CHECK(*t == Catch::Approx(100.0));

  CHECK_FALSE(ray_rect_first_hit({0.0, 0.0}, {0.0, 1.0}, r).has_value());
  CHECK_FALSE(ray_rect_first_hit({0.0, 100.0}, {1.0, 0.0}, r).has_value());

  // Ray starting inside reports the exit.
  auto exit = ray_rect_first_hit({150.0, 0.0}, {1.0, 0.0}, r);
  REQUIRE(exit.has_value());
  CHECK(*exit == Catch::Approx(50.0));

  // Behind the origin: no hit.
  CHECK_FALSE(ray_rect_first_hit({300.0, 0.0}, {1.0, 0.0}, r).has_value());
}

TEST_CASE("ray-circle first hit", "[core]") {
  auto t = ray_circle_first_hit({0.0, 0.0}, {1.0, 0.0}, {200.0, 0.0}, 50.0);
  REQUIRE(t.has_value());
  CHECK(*t == Catch::Approx(150.0));

  CHECK_FALSE(ray_circle_first_hit({0.0, 0.0}, {1.0, 0.0}, {200.0, 100.0}, 50.0).has_value());
  CHECK_FALSE(ray_circle_first_hit({0.0, 0.0}, {-1.0, 0.0}, {200.0, 0.0}, 50.0).has_value());

  // Tangent ray grazes at one point.
  auto tangent = ray_circle_first_hit({0.0, 50.0}, {1.0, 0.0}, {200.0, 0.0}, 50.0);
  REQUIRE(tangent.has_value());
  CHECK(*tangent == Catch::Approx(200.0));
}

TEST_CASE("segment-rect interior crossing ignores grazing", "[core]") {
  Rect r{{100.0, 100.0}, {200.0, 200.0}};
  CHECK(segment_crosses_rect_interior({50.0, 150.0}, {250.0, 150.0}, r));
  CHECK_FALSE(segment_crosses_rect_interior({50.0, 100.0}, {250.0, 100.0}, r));  // slides on edge
  CHECK_FALSE(segment_crosses_rect_interior({50.0, 150.0}, {99.0, 150.0}, r));
  CHECK(segment_crosses_rect_interior({150.0, 150.0}, {250.0, 150.0}, r));  // starts inside
}

TEST_CASE("vector helpers", "[core]") {
  Vec2 v{3.0, 4.0};
  CHECK(v.norm() == Catch::Approx(5.0));
  CHECK(v.normalized().norm() == Catch::Approx(1.0));
  CHECK(Vec2{1.0, 0.0}.rotated(deg_to_rad(90.0)).y == Catch::Approx(1.0));
  CHECK(angle_between({1.0, 0.0}, {0.0, 1.0}) == Catch::Approx(kPi / 2.0));
  CHECK(Vec2{1.0, 0.0}.perp_ccw() == Vec2{0.0, 1.0});
  CHECK(Vec2{1.0, 0.0}.perp_cw() == Vec2{0.0, -1.0});
}

TEST_CASE("rng streams are reproducible and serializable", "[core]") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
  a.normal();
  std::ostringstream os;
  os << a;
  Rng c;
  std::istringstream is(os.str());
  is >> c;
  for (int i = 0; i < 10; ++i) {
    REQUIRE(a.normal() == c.normal());
    REQUIRE(a.uniform() == c.uniform());
  }
}

TEST_CASE("rng uniform bounds and shuffle determinism", "[core]") {
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    int k = r.uniform_int(-3, 7);
    REQUIRE(k >= -3);
    REQUIRE(k <= 7);
  }
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8}, v2 = v1;
  Rng s1(9), s2(9);
  s1.shuffle(v1);
  s2.shuffle(v2);
  REQUIRE(v1 == v2);
}

TEST_CASE("rng normal moments", "[core]") {
  Rng r(123);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sq / n == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("config parses the toml subset", "[core]") {
  ConfigMap cfg;
  cfg.merge_toml(R"(
# top comment
name = "eval arena"   # trailing comment
[arena]
side = 4000.0
tick_hz = 30
locked = false
stations = [[200.0, 200.0], [3800.0, 200.0]]
mixed = [1, 2.5, "x"]
)");
  CHECK(cfg.get_string("name", "") == "eval arena");
  CHECK(cfg.get_double("arena.side", 0.0) == 4000.0);
  CHECK(cfg.get_int("arena.tick_hz", 0) == 30);
  CHECK(cfg.get_bool("arena.locked", true) == false);
  const auto& st = cfg.at("arena.stations").as_array();
  REQUIRE(st.size() == 2);
  CHECK(st[1].as_array()[0].as_double() == 3800.0);
  CHECK(cfg.at("arena.mixed").as_array()[2].as_string() == "x");
}

TEST_CASE("config precedence and canonical output", "[core]") {
  ConfigMap cfg;
  cfg.merge_toml("[a]\nx = 1\ny = 2\n");
  cfg.merge_toml("[a]\nx = 10\n");  // file over defaults
  cfg.merge_override("a.y=20");     // cli over file
  CHECK(cfg.get_int("a.x", 0) == 10);
  CHECK(cfg.get_int("a.y", 0) == 20);

  std::string snap = cfg.to_toml();
  ConfigMap round;
  round.merge_toml(snap);
  CHECK(round.to_toml() == snap);
  CHECK(config_hash(round) == config_hash(cfg));
}

TEST_CASE("config rejects malformed input", "[core]") {
  ConfigMap cfg;
  CHECK_THROWS_AS(cfg.merge_toml("key 5\n"), ConfigError);
  CHECK_THROWS_AS(cfg.merge_toml("x = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(cfg.merge_toml("x = 1z3\n"), ConfigError);
  CHECK_THROWS_AS(cfg.merge_override("novalue"), ConfigError);
  CHECK_THROWS_AS(ConfigMap{}.at("missing"), ConfigError);
}
