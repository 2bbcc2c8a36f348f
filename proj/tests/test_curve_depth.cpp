#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cyclone/curve_depth.hpp"
#include "cyclone/errors.hpp"
#include "cyclone/rng.hpp"

using namespace cyclone;

namespace {

Track make_track(const std::vector<std::pair<double, double>>& latlon) {
  Track t;
  t.storm_id = "TEST";
  for (std::size_t i = 0; i < latlon.size(); ++i)
    t.points.push_back(TrackPoint{TimePoint{} + i * kSynopticStep,
                                  latlon[i].first, latlon[i].second});
  return t;
}

// Distance matrix of random planar points; Euclidean, so a true metric.
DistanceMatrix random_metric(std::size_t n, RandomStream& rng) {
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {rng.uniform(-100, 100), rng.uniform(-100, 100)};
  DistanceMatrix D;
  D.n = n;
  D.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      D.at(i, j) = std::hypot(pts[i].first - pts[j].first,
                              pts[i].second - pts[j].second);
  return D;
}

// Depth written as literally as possible: enumerate every unordered pair
// not containing i, then count.
std::vector<double> depth_oracle(const DistanceMatrix& D) {
  const std::size_t n = D.n;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (j < k) pairs.emplace_back(j, k);

  std::vector<double> depths(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0, total = 0;
    for (const auto& [j, k] : pairs) {
      if (j == i || k == i) continue;
      ++total;
      if (D.at(j, k) > std::max(D.at(i, j), D.at(i, k))) ++count;
    }
    depths[i] = static_cast<double>(count) / static_cast<double>(total);
  }
  return depths;
}

}  // namespace

TEST_CASE("metric depth agrees with the pair-enumeration oracle") {
  RandomStream rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(10);
    const DistanceMatrix D = random_metric(n, rng);
    const DepthRanking ranking = metric_depth(D);
    const std::vector<double> expect = depth_oracle(D);
    REQUIRE(ranking.depths.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(ranking.depths[i] == doctest::Approx(expect[i]).epsilon(1e-14));
      CHECK(ranking.depths[i] >= 0.0);
      CHECK(ranking.depths[i] <= 1.0);
    }
    // order really is sorted by depth, ties broken by index
    for (std::size_t r = 1; r < n; ++r) {
      const std::size_t a = ranking.order[r - 1], b = ranking.order[r];
      const bool ok = ranking.depths[a] > ranking.depths[b] ||
                      (ranking.depths[a] == ranking.depths[b] && a < b);
      CHECK(ok);
    }
  }
}

TEST_CASE("five collinear curves have the textbook depths") {
  // distances |i - j| on a line: the middle element is deepest
  DistanceMatrix D;
  D.n = 5;
  D.values.assign(25, 0.0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      D.at(i, j) = std::abs(static_cast<double>(i) - static_cast<double>(j));

  const DepthRanking ranking = metric_depth(D);
  CHECK(ranking.depths[0] == 0.0);
  CHECK(ranking.depths[1] == doctest::Approx(0.5));
  CHECK(ranking.depths[2] == doctest::Approx(2.0 / 3.0));
  CHECK(ranking.depths[3] == doctest::Approx(0.5));
  CHECK(ranking.depths[4] == 0.0);
  CHECK(ranking.order == std::vector<std::size_t>{2, 1, 3, 0, 4});
}

TEST_CASE("depth is invariant to relabeling and scaling") {
  RandomStream rng(52);
  const std::size_t n = 8;
  const DistanceMatrix D = random_metric(n, rng);
  const DepthRanking base = metric_depth(D);

  SUBCASE("scaling all distances changes nothing") {
    DistanceMatrix S = D;
    for (double& v : S.values) v *= 37.5;
    const DepthRanking scaled = metric_depth(S);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(scaled.depths[i] == base.depths[i]);
  }
  SUBCASE("reversing the labels permutes the depths") {
    DistanceMatrix Rv;
    Rv.n = n;
    Rv.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        Rv.at(i, j) = D.at(n - 1 - i, n - 1 - j);
    const DepthRanking rev = metric_depth(Rv);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(rev.depths[i] == base.depths[n - 1 - i]);
  }
  SUBCASE("thread count does not change anything") {
    const DepthRanking threaded = metric_depth(D, 4);
    CHECK(threaded.depths == base.depths);
    CHECK(threaded.order == base.order);
  }
}

TEST_CASE("all-identical curves tie at depth zero") {
  DistanceMatrix D;
  D.n = 4;
  D.values.assign(16, 0.0);
  const DepthRanking ranking = metric_depth(D);
  for (double d : ranking.depths) CHECK(d == 0.0);
  CHECK(ranking.order == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("metric depth needs at least three curves") {
  DistanceMatrix D;
  D.n = 2;
  D.values.assign(4, 0.0);
  CHECK_THROWS_AS((void)metric_depth(D), DomainError);
}

TEST_CASE("curve distance hand cases") {
  SUBCASE("identical tracks are at distance zero") {
    const Track a = make_track({{10, 20}, {11, 21}, {12, 22}});
    CHECK(curve_distance(a, a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
  SUBCASE("two single points reduce to the great-circle distance") {
    const Track a = make_track({{10, 20}});
    const Track b = make_track({{10, 21}});
    CHECK(curve_distance(a, b) ==
          doctest::Approx(109.50573519924369).epsilon(1e-9));
  }
  SUBCASE("a contained point costs a quarter of the stray distance") {
    // A = {P, Q}, B = {P}: mean-min A->B = d(P,Q)/2, B->A = 0
    const Track a = make_track({{30, -50}, {31, -50}});
    const Track b = make_track({{30, -50}});
    CHECK(curve_distance(a, b) ==
          doctest::Approx(27.798770058383266).epsilon(1e-9));
  }
  SUBCASE("symmetry on random unequal-length tracks") {
    RandomStream rng(53);
    for (int t = 0; t < 20; ++t) {
      std::vector<std::pair<double, double>> pa, pb;
      for (std::size_t i = 0; i < 3 + rng.uniform_index(5); ++i)
        pa.emplace_back(rng.uniform(-60, 60), rng.uniform(-170, 170));
      for (std::size_t i = 0; i < 3 + rng.uniform_index(5); ++i)
        pb.emplace_back(rng.uniform(-60, 60), rng.uniform(-170, 170));
      const Track a = make_track(pa), b = make_track(pb);
      CHECK(curve_distance(a, b) == curve_distance(b, a));
      CHECK(curve_distance(a, b) >= 0.0);
    }
  }
  SUBCASE("empty tracks are rejected") {
    CHECK_THROWS_AS((void)curve_distance(Track{}, make_track({{0, 0}})),
                    DomainError);
  }
}

TEST_CASE("distance matrix matches pairwise calls and is symmetric") {
  RandomStream rng(54);
  std::vector<Track> tracks;
  for (int t = 0; t < 6; ++t) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < 4 + rng.uniform_index(4); ++i)
      pts.emplace_back(rng.uniform(5, 45), rng.uniform(-80, -20));
    tracks.push_back(make_track(pts));
  }
  const DistanceMatrix D = distance_matrix(tracks);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    CHECK(D.at(i, i) == 0.0);
    for (std::size_t j = 0; j < tracks.size(); ++j) {
      CHECK(D.at(i, j) == D.at(j, i));
      if (i < j) CHECK(D.at(i, j) == curve_distance(tracks[i], tracks[j]));
    }
  }
  const DistanceMatrix D4 = distance_matrix(tracks, 4);
  CHECK(D4.values == D.values);

  CHECK_THROWS_AS((void)distance_matrix({}), DomainError);
}

TEST_CASE("coverage count ceilings, guards and clamps") {
  CHECK(coverage_count(0.90, 350) == 315);
  CHECK(coverage_count(0.29, 100) == 29);
  CHECK(coverage_count(0.30, 10) == 3);
  CHECK(coverage_count(0.95, 20) == 19);
  CHECK(coverage_count(0.05, 10) == 1);
  CHECK(coverage_count(1.0, 10) == 10);
  CHECK(coverage_count(1e-12, 5) == 1);  // clamped up
  CHECK(coverage_count(0.5, 1) == 1);
}

TEST_CASE("deepest subset takes a prefix of the ranking") {
  DistanceMatrix D;
  D.n = 5;
  D.values.assign(25, 0.0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      D.at(i, j) = std::abs(static_cast<double>(i) - static_cast<double>(j));
  const DepthRanking ranking = metric_depth(D);

  CHECK(deepest_subset(ranking, 0.35) ==
        std::vector<std::size_t>{2, 1, 3, 0});  // ceil(0.65*5) = 4
  CHECK(deepest_subset(ranking, 0.001).size() == 5);
  CHECK(deepest_subset(ranking, 0.999) == std::vector<std::size_t>{2});
  CHECK_THROWS_AS((void)deepest_subset(ranking, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)deepest_subset(ranking, 1.0), std::invalid_argument);
}
