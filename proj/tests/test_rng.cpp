#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cyclone/rng.hpp"

using namespace cyclone;

TEST_CASE("splitmix64 matches the published sequence") {
  // first outputs of the canonical splitmix64 stream from states 0 and 1
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(1) == 0x910a2dec89025cc1ULL);
  CHECK(splitmix64(0xdeadbeefULL) == 0x4adfb90f68c9eb9bULL);
}

TEST_CASE("mix_seed is stable and spreads indices apart") {
  CHECK(mix_seed(42, 0) == 0xe5471b8dce01c859ULL);
  CHECK(mix_seed(42, 1) == 0xbcd030a34efc6855ULL);

  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) seen.insert(mix_seed(7, i));
  CHECK(seen.size() == 2000);  // no collisions across member indices
}

TEST_CASE("mt19937_64 seeding is standard-specified") {
  RandomStream rng(5489);  // the engine's default seed
  CHECK(rng.next_u64() == 14514284786278117030ULL);
}

TEST_CASE("identical seeds give identical streams") {
  RandomStream a(987), b(987);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform_index(17) == b.uniform_index(17));
  }
}

TEST_CASE("uniform01 stays in [0, 1) and is roughly uniform") {
  RandomStream rng(21);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal has the right first moments") {
  RandomStream rng(22);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(0.0).epsilon(1).scale(0.02));
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_index covers [0, n) without bias") {
  RandomStream rng(23);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.05));
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("bernoulli hits its probability") {
  RandomStream rng(24);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (rng.bernoulli(0.3)) ++hits;
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.3).epsilon(0.02));
  RandomStream z(25);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(z.bernoulli(0.0));
}
