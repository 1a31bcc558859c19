#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../oracles.hpp"
#include "jasmine/random.hpp"
#include "jasmine/stats.hpp"

using namespace jasmine;

TEST_SUITE("stats") {
  TEST_CASE("f1") {
    std::vector<Label> y{1, 0, 1, 1, 0};
    CHECK(f1_score(y, y) == 1.0);
    std::vector<Label> none(5, 0);
    CHECK(f1_score(none, y) == 0.0);
    CHECK(f1_score(none, none) == 0.0);
    std::vector<Label> p{1, 1, 0, 1, 0};  // tp 2, fp 1, fn 1
    CHECK(f1_score(p, y) == doctest::Approx(4.0 / 6.0));
    Engine rng(1);
    std::vector<std::size_t> perm{0, 1, 2, 3, 4};
    shuffle(perm, rng);
    std::vector<Label> p2, y2;
    for (auto i : perm) {
      p2.push_back(p[i]);
      y2.push_back(y[i]);
    }
    CHECK(f1_score(p2, y2) == f1_score(p, y));
  }

  TEST_CASE("coin1 closed form") {
    std::vector<Label> y(1000, 0);
    std::fill(y.begin(), y.begin() + 569, 1);
    CHECK(coin1_f1(y) == doctest::Approx(2 * 0.569 / 1.569));
    CHECK(coin1_f1(y) == doctest::Approx(0.7253).epsilon(1e-4));
  }

  TEST_CASE("areas") {
    LearningCurve c{"m", 0, {}};
    for (int t = 0; t <= 10; ++t) c.points.push_back({t, 0, 0.7});
    CHECK(curve_area(c, 10) == doctest::Approx(7.0));
    CHECK(curve_area(c, 0) == 0.0);
    LearningCurve tri{"m", 0, {{0, 0, 0.0}, {1, 0, 1.0}}};
    CHECK(curve_area(tri, 1) == 0.5);
    std::vector<double> ones(4, 1.0);
    CHECK(trapezoid_area(ones) == 3.0);
    CHECK_THROWS(curve_area(tri, 2));
    LearningCurve higher = c;
    for (auto& p : higher.points) p.metric += 0.1 * (p.t % 3);
    CHECK(curve_area(higher, 10) >= curve_area(c, 10));
  }

  TEST_CASE("wilcoxon: small cases") {
    std::vector<double> a{1, 2, 3, 4, 5}, b{0, 0, 0, 0, 0};
    auto r = wilcoxon_one_sided(a, b);
    CHECK(r.p_value == 0.03125);
    CHECK(r.exact);
    CHECK(r.w_plus == 15.0);
    CHECK_THROWS_AS(wilcoxon_one_sided(a, a), UndefinedTestError);
    std::vector<double> four{1, 2, 3, 4, 0}, zero(5, 0.0);
    CHECK_THROWS_AS(wilcoxon_one_sided(four, zero), UndefinedTestError);
  }

  TEST_CASE("wilcoxon: exact p equals enumeration, and swapping gives the complement") {
    Engine rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 5 + uniform_index(rng, 6);
      std::vector<double> a, b;
      for (std::size_t i = 0; i < n; ++i) {
        // coarse values produce ties and zeros
        a.push_back(std::round(uniform01(rng) * 8) / 8);
        b.push_back(std::round(uniform01(rng) * 8) / 8);
      }
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < n; ++i) nonzero += a[i] != b[i];
      if (nonzero < 5) continue;
      const auto ab = wilcoxon_one_sided(a, b);
      const auto ba = wilcoxon_one_sided(b, a);
      CHECK(ab.p_value == oracle::wilcoxon_enumerated(a, b));
      CHECK(ba.p_value == oracle::wilcoxon_enumerated(b, a));
      // swapping turns W+ into S - W+, so p(b,a) = P(W+ <= w) = 1 - p(a,b) + P(W+ = w)
      const auto tail = oracle::wilcoxon_tail(a, b);
      CHECK(ba.p_value == doctest::Approx(1.0 - ab.p_value + tail.exactly).epsilon(1e-12));
    }
  }

  TEST_CASE("wilcoxon: large n uses the normal approximation") {
    std::vector<double> a, b;
    Engine rng(2);
    for (int i = 0; i < 60; ++i) {
      a.push_back(uniform01(rng) + 0.3);
      b.push_back(uniform01(rng));
    }
    auto r = wilcoxon_one_sided(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.p_value < 0.01);
    auto s = wilcoxon_one_sided(b, a);
    CHECK(s.p_value > 0.99);
    // the exact path at n = 25 and the approximation agree roughly
    std::vector<double> x, y;
    for (int i = 0; i < 25; ++i) {
      x.push_back(i % 3 == 0 ? -(i + 1.0) : (i + 1.0));
      y.push_back(0.0);
    }
    auto exact = wilcoxon_one_sided(x, y);
    CHECK(exact.exact);
    const double n = 25, mean = n * (n + 1) / 4, sd = std::sqrt(n * (n + 1) * (2 * n + 1) / 24);
    const double approx = 0.5 * std::erfc((exact.w_plus - mean - 0.5) / sd / std::sqrt(2.0));
    CHECK(std::abs(exact.p_value - approx) < 0.01);
  }

  TEST_CASE("default t_ref grid") {
    CHECK(default_tref_grid(50) == std::vector<int>{9, 16, 22, 34, 47, 50});
    CHECK(default_tref_grid(375) == std::vector<int>{9, 16, 22, 34, 47, 122, 247, 372, 375});
    CHECK(default_tref_grid(372).back() == 372);
    CHECK(default_tref_grid(5) == std::vector<int>{5});
  }
}
