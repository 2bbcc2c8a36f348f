#include <doctest.h>

#include <cmath>

#include "cyclone/geodesy.hpp"
#include "cyclone/rng.hpp"

using namespace cyclone;

// Reference values computed independently with the haversine / forward
// formulas at R = 6371.0088 km.

TEST_CASE("great-circle distance matches reference values") {
  CHECK(gc_distance({0, 0}, {0, 90}) == doctest::Approx(10007.55722101796).epsilon(1e-12));
  CHECK(gc_distance({0, 0}, {0, 180}) == doctest::Approx(20015.114442035923).epsilon(1e-12));
  CHECK(gc_distance({10, 25}, {11, 25}) == doctest::Approx(111.19508023353288).epsilon(1e-12));
  CHECK(gc_distance({25.7617, -80.1918}, {40.7128, -74.0060}) ==
        doctest::Approx(1757.9636532728741).epsilon(1e-12));
  CHECK(gc_distance({10, 10}, {20, 20}) == doctest::Approx(1544.7596947396296).epsilon(1e-12));
}

TEST_CASE("distance is symmetric, nonnegative, zero iff coincident") {
  RandomStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint a{rng.uniform(-80, 80), rng.uniform(-180, 180)};
    const GeoPoint b{rng.uniform(-80, 80), rng.uniform(-180, 180)};
    const double d = gc_distance(a, b);
    CHECK(d >= 0.0);
    CHECK(gc_distance(b, a) == doctest::Approx(d).epsilon(1e-14));
    CHECK(gc_distance(a, a) == 0.0);
  }
}

TEST_CASE("triangle inequality holds on random triples") {
  RandomStream rng(12);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a{rng.uniform(-85, 85), rng.uniform(-180, 180)};
    const GeoPoint b{rng.uniform(-85, 85), rng.uniform(-180, 180)};
    const GeoPoint c{rng.uniform(-85, 85), rng.uniform(-180, 180)};
    CHECK(gc_distance(a, c) <= gc_distance(a, b) + gc_distance(b, c) + 1e-9);
  }
}

TEST_CASE("initial bearing matches reference values") {
  CHECK(initial_bearing({0, 0}, {0, 90}) == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(initial_bearing({0, 0}, {45, 0}) == doctest::Approx(0.0));
  CHECK(initial_bearing({0, 0}, {-45, 0}) == doctest::Approx(180.0).epsilon(1e-12));
  CHECK(initial_bearing({25.7617, -80.1918}, {40.7128, -74.0060}) ==
        doctest::Approx(17.44491701581609).epsilon(1e-12));
  CHECK(initial_bearing({10, 10}, {20, 20}) ==
        doctest::Approx(42.81406845774336).epsilon(1e-12));
}

TEST_CASE("bearing to a coincident point is undefined") {
  CHECK_THROWS_AS((void)initial_bearing({10, 10}, {10, 10}),
                  std::invalid_argument);
}

TEST_CASE("destination matches reference values") {
  const GeoPoint d1 = destination({30, -60}, 37, 450);
  CHECK(d1.lat == doctest::Approx(33.200108527947705).epsilon(1e-12));
  CHECK(d1.lon == doctest::Approx(-57.09053697492925).epsilon(1e-12));

  const GeoPoint d2 = destination({0, 0}, 0, std::numbers::pi * kEarthRadiusKm / 4);
  CHECK(d2.lat == doctest::Approx(45.0).epsilon(1e-12));
  CHECK(d2.lon == doctest::Approx(0.0));

  SUBCASE("crossing the antimeridian normalizes longitude") {
    const GeoPoint d3 = destination({10, 179.5}, 90, 200);
    CHECK(d3.lat == doctest::Approx(9.99502244579927).epsilon(1e-10));
    CHECK(d3.lon == doctest::Approx(-178.67363098928575).epsilon(1e-10));
  }
}

TEST_CASE("destination with distance zero returns the start exactly") {
  const GeoPoint a{23.4, -77.8};
  const GeoPoint b = destination(a, 123.0, 0.0);
  CHECK(b.lat == a.lat);
  CHECK(b.lon == a.lon);
}

TEST_CASE("destination then distance/bearing round-trips") {
  RandomStream rng(13);
  for (int i = 0; i < 300; ++i) {
    const GeoPoint a{rng.uniform(-70, 70), rng.uniform(-180, 180)};
    const double bearing = rng.uniform(0, 360);
    const double dist = rng.uniform(1.0, 2000.0);
    const GeoPoint b = destination(a, bearing, dist);
    CHECK(gc_distance(a, b) == doctest::Approx(dist).epsilon(1e-9));
    CHECK(initial_bearing(a, b) ==
          doctest::Approx(wrap_bearing(bearing)).epsilon(1e-6));
  }
}

TEST_CASE("bearing wrap maps into [0, 360)") {
  CHECK(wrap_bearing(0.0) == 0.0);
  CHECK(wrap_bearing(360.0) == 0.0);
  CHECK(wrap_bearing(-10.0) == doctest::Approx(350.0));
  CHECK(wrap_bearing(725.0) == doctest::Approx(5.0));
  RandomStream rng(14);
  for (int i = 0; i < 200; ++i) {
    const double w = wrap_bearing(rng.uniform(-2000, 2000));
    CHECK(w >= 0.0);
    CHECK(w < 360.0);
  }
}

TEST_CASE("delta bearing takes the short way around") {
  CHECK(wrap_delta_bearing(350.0, 10.0) == doctest::Approx(20.0));
  CHECK(wrap_delta_bearing(10.0, 350.0) == doctest::Approx(-20.0));
  CHECK(wrap_delta_bearing(0.0, 180.0) == doctest::Approx(180.0));
  CHECK(wrap_delta_bearing(90.0, 90.0) == 0.0);

  SUBCASE("always lands in (-180, 180]") {
    RandomStream rng(15);
    for (int i = 0; i < 500; ++i) {
      const double d =
          wrap_delta_bearing(rng.uniform(0, 360), rng.uniform(0, 360));
      CHECK(d > -180.0);
      CHECK(d <= 180.0);
    }
  }

  SUBCASE("applying the delta recovers the target bearing") {
    RandomStream rng(16);
    for (int i = 0; i < 200; ++i) {
      const double prev = rng.uniform(0, 360);
      const double next = rng.uniform(0, 360);
      const double d = wrap_delta_bearing(prev, next);
      CHECK(wrap_bearing(prev + d) == doctest::Approx(next).epsilon(1e-9));
    }
  }
}

TEST_CASE("longitude normalization lands in [-180, 180]") {
  CHECK(normalize_lon(190.0) == doctest::Approx(-170.0));
  CHECK(normalize_lon(-190.0) == doctest::Approx(170.0));
  CHECK(normalize_lon(540.0) == doctest::Approx(180.0));
  CHECK(normalize_lon(45.0) == 45.0);
}

TEST_CASE("step speed is distance over six hours") {
  CHECK(step_speed({0, 0}, {0, 90}) ==
        doctest::Approx(10007.55722101796 / 6.0).epsilon(1e-12));
  CHECK(step_speed({5, 5}, {5, 5}) == 0.0);
}
