#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "jasmine/random.hpp"

using namespace jasmine;

TEST_SUITE("random") {
  TEST_CASE("seed paths are stable and order sensitive") {
    CHECK(SeedPath(7).with("a").with(3).seed() == SeedPath(7).with("a").with(3).seed());
    CHECK(SeedPath(7).with("a").with(3).seed() != SeedPath(7).with(3).with("a").seed());
    CHECK(SeedPath(7).with("a").seed() != SeedPath(7).with("b").seed());
    CHECK(SeedPath(7).seed() != SeedPath(8).seed());
    CHECK(stable_hash("abc") == stable_hash("abc"));
    CHECK(stable_hash("abc") != stable_hash("abd"));
  }

  TEST_CASE("fnv-1a reference values") {
    CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
  }

  TEST_CASE("uniform_index stays in range and covers it") {
    Engine rng(1);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
      auto v = uniform_index(rng, 7);
      REQUIRE(v < 7);
      ++hits[v];
    }
    for (int h : hits) CHECK(h > 800);
    CHECK(uniform_index(rng, 1) == 0);
  }

  TEST_CASE("uniform01 in [0,1) with sensible moments") {
    Engine rng(2);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
      double u = uniform01(rng);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("standard normal moments") {
    Engine rng(3);
    double s = 0.0, s2 = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      double z = standard_normal(rng);
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.03);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("sample without replacement: distinct, in range, both regimes") {
    Engine rng(4);
    for (auto [n, k] : std::vector<std::pair<std::size_t, std::size_t>>{{10, 10}, {10, 3}, {100000, 5}, {50, 0}}) {
      auto picks = sample_without_replacement(rng, n, k);
      CHECK(picks.size() == k);
      std::set<std::size_t> unique(picks.begin(), picks.end());
      CHECK(unique.size() == k);
      for (auto p : picks) CHECK(p < n);
    }
    CHECK_THROWS(sample_without_replacement(rng, 3, 4));
  }

  TEST_CASE("shuffle is a permutation and deterministic") {
    std::vector<int> a(50);
    std::iota(a.begin(), a.end(), 0);
    auto b = a;
    Engine r1(9), r2(9);
    shuffle(a, r1);
    shuffle(b, r2);
    CHECK(a == b);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(50);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);
  }
}
