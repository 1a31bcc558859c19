#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "jasmine/alpha_dynamics.hpp"
#include "jasmine/random.hpp"

using namespace jasmine;

TEST_SUITE("alpha") {
  TEST_CASE("info metric hand values") {
    std::vector<QueriedOutcome> correct{{0.2, 0, 0}, {0.9, 1, 1}};
    CHECK(info_metric(correct, 2.0) == 0.0);
    std::vector<QueriedOutcome> fp{{0.9, 1, 0}};
    CHECK(std::abs(info_metric(fp, 2.0) - 0.9) <= 1e-12);
    std::vector<QueriedOutcome> fn{{0.2, 0, 1}};
    CHECK(std::abs(info_metric(fn, 2.0) - 0.8) <= 1e-12);
    CHECK_THROWS_AS(info_metric({}, 1.0), std::invalid_argument);
  }

  TEST_CASE("info metric agrees with the direct formula and stays in [0,1]") {
    Engine rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
      const double beta = std::vector<double>{0.5, 1.0, 2.0}[uniform_index(rng, 3)];
      std::vector<QueriedOutcome> s;
      std::vector<oracle::Outcome> o;
      const std::size_t n = 1 + uniform_index(rng, 25);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = uniform01(rng);
        const Label truth = uniform01(rng) < 0.4;
        s.push_back({p, static_cast<Label>(p >= 0.5), truth});
        o.push_back({p, p >= 0.5, truth});
      }
      const double d = info_metric(s, beta);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      CHECK(std::abs(d - oracle::delta(o, beta)) <= 1e-12);
    }
  }

  TEST_CASE("update factor") {
    CHECK(update_factor(0.7, 0.2, 1.0) == 0.7 - 0.2);
    CHECK(update_factor(0.5, 0.25, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(update_factor(0.25, 0.5, 0.5) == doctest::Approx(-0.0625).epsilon(1e-15));
    CHECK(update_factor(0.3, 0.3, 2.0) == 0.0);
    Engine rng(1);
    for (int i = 0; i < 500; ++i) {
      const double a = uniform01(rng), z = uniform01(rng), g = uniform_real(rng, 0.2, 3.0);
      const double f = update_factor(a, z, g);
      CHECK((f > 0) == (a > z));
      CHECK(std::abs(std::abs(f) - std::pow(std::abs(a - z), 1.0 / g)) <= 1e-12);
    }
  }

  TEST_CASE("random-share schedule") {
    FractionSchedule s(40, 125, 1.0 / 800);
    CHECK(s.alpha_r_max() == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(s.alpha_min() == 1.0 / 40);
    CHECK(std::abs(s.alpha_r(0) - 0.95 * std::pow(2.0, -125.0 / 800)) <= 1e-12);
    CHECK(std::abs(s.alpha_r(0) - 0.8524868106264759) <= 1e-12);
    for (int t = 0; t < 400; ++t) CHECK(s.alpha_r(t + 1) < s.alpha_r(t));
    CHECK_THROWS(FractionSchedule(1, 10, 0.1));
    CHECK_THROWS(FractionSchedule(40, 10, 0.0));
  }

  TEST_CASE("lambda maps endpoints to endpoints") {
    FractionSchedule s(40, 125, 1.0 / 400);
    for (int t = 0; t < 50; ++t) {
      CHECK(s.rescale(t, s.alpha_min()) == doctest::Approx(s.alpha_min()).epsilon(1e-14));
      CHECK(s.rescale(t, s.alpha_az_max(t)) == doctest::Approx(s.alpha_az_max(t + 1)).epsilon(1e-14));
    }
  }

  TEST_CASE("initial fractions") {
    FractionSchedule s(40, 125, 1.0 / 800);
    JasmineParams p;
    p.alpha_a0 = 0.25;
    auto f = initial_fractions(p, s);
    CHECK(f.t == 0);
    CHECK(f.alpha_r == s.alpha_r(0));
    CHECK(f.alpha_a == doctest::Approx(0.25 * (1 - s.alpha_r(0))));
    CHECK(fractions_valid(f, s));
    p.alpha_a0 = 0.0;
    CHECK(fractions_valid(initial_fractions(p, s), s));
    p.alpha_a0 = 1.0;
    CHECK(fractions_valid(initial_fractions(p, s), s));
  }

  TEST_CASE("zero and unit factors") {
    FractionSchedule s(40, 125, 1.0 / 800);
    auto f = initial_fractions({}, s);
    auto still = update_fractions(f, 0.0, s);
    CHECK(still.alpha_a == doctest::Approx(s.rescale(0, f.alpha_a)).epsilon(1e-14));
    CHECK(still.alpha_z == doctest::Approx(s.rescale(0, f.alpha_z)).epsilon(1e-14));
    auto up = update_fractions(f, 1.0, s);
    CHECK(up.alpha_a == doctest::Approx(s.alpha_az_max(1)).epsilon(1e-14));
    CHECK(up.alpha_z == doctest::Approx(s.alpha_min()).epsilon(1e-14));
    CHECK(up.t == 1);
  }

  TEST_CASE("fuzzed updates keep the invariants and match the reference") {
    Engine rng(11);
    for (int run = 0; run < 20; ++run) {
      const int q = std::vector<int>{3, 10, 40, 80}[uniform_index(rng, 4)];
      const double tau = std::vector<double>{1.0 / 800, 1.0 / 400, 1.0 / 200, 1.0 / 100}[uniform_index(rng, 4)];
      const std::size_t l0 = 20 + uniform_index(rng, 300);
      FractionSchedule s(q, l0, tau);
      JasmineParams p;
      p.alpha_a0 = uniform01(rng);
      auto f = initial_fractions(p, s);
      for (int step = 0; step < 200; ++step) {
        const double gamma = std::vector<double>{0.5, 1.0, 2.0}[uniform_index(rng, 3)];
        const double dg = update_factor(uniform01(rng), uniform01(rng), gamma);
        auto next = update_fractions(f, dg, s);
        auto ref = oracle::update({f.alpha_a, f.alpha_z, f.alpha_r}, dg, q, static_cast<double>(l0), tau, f.t);
        CHECK(std::abs(next.alpha_a - ref.a) <= 1e-12);
        CHECK(std::abs(next.alpha_z - ref.z) <= 1e-12);
        CHECK(std::abs(next.alpha_r - ref.r) <= 1e-15);
        REQUIRE(fractions_valid(next, s));
        if (dg > 0) CHECK(next.alpha_a >= s.rescale(f.t, f.alpha_a) - 1e-15);
        if (dg < 0) CHECK(next.alpha_z >= s.rescale(f.t, f.alpha_z) - 1e-15);
        f = next;
      }
    }
  }

  TEST_CASE("parameter validation") {
    JasmineParams p;
    CHECK_NOTHROW(p.validate());
    p.beta = 0.0;
    CHECK_THROWS(p.validate());
    p = {};
    p.gamma = -1.0;
    CHECK_THROWS(p.validate());
    p = {};
    p.tau = 0.0;
    CHECK_THROWS(p.validate());
  }
}
