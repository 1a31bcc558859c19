#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "jasmine/query.hpp"

using namespace jasmine;

namespace {

struct Pool {
  IndexList idx;
  std::vector<double> prob, anomaly, certainty;
  std::vector<Label> pred;
  ScoredPool view() const { return {idx, prob, pred, anomaly, certainty}; }
};

Pool random_pool(std::size_t n, Engine& rng, double p_class1 = 0.5) {
  Pool p;
  for (std::size_t i = 0; i < n; ++i) {
    p.idx.push_back(1000 + 3 * i);
    const double y = uniform01(rng) < p_class1 ? 0.5 + 0.5 * uniform01(rng) : 0.5 * uniform01(rng);
    p.prob.push_back(y);
    p.pred.push_back(y >= 0.5);
    p.anomaly.push_back(std::round(uniform01(rng) * 50) / 50);  // force ties
    p.certainty.push_back(certainty_score(y));
  }
  return p;
}

}  // namespace

TEST_SUITE("query") {
  TEST_CASE("certainty score") {
    CHECK(certainty_score(0.5) == 0.0);
    CHECK(certainty_score(0.0) == 1.0);
    CHECK(certainty_score(1.0) == 1.0);
    CHECK(certainty_score(0.8) == doctest::Approx(0.6).epsilon(1e-15));
  }

  TEST_CASE("allocate_counts examples") {
    auto even = allocate_counts({0.5, 0.5, 0.0, 0}, 40);
    CHECK(even.anomalous == std::array<int, 2>{10, 10});
    CHECK(even.uncertain == std::array<int, 2>{10, 10});
    CHECK(even.random == 0);

    const double third = 1.0 / 3.0;
    auto thirds = allocate_counts({third, third, third, 0}, 40);
    CHECK(thirds.total() == 40);
    const double targets[] = {third * 20, third * 20, third * 20, third * 20, third * 40};
    const int got[] = {thirds.anomalous[0], thirds.anomalous[1], thirds.uncertain[0], thirds.uncertain[1],
                       thirds.random};
    for (int i = 0; i < 5; ++i) CHECK(std::abs(got[i] - targets[i]) < 1.0);

    auto floor = allocate_counts({0.025, 0.025, 0.95, 0}, 40);
    CHECK(floor.total() == 40);
    CHECK(floor.anomalous[0] + floor.anomalous[1] >= 1);
    CHECK(floor.uncertain[0] + floor.uncertain[1] >= 1);
    CHECK(floor.random == 38);
  }

  TEST_CASE("allocate_counts always sums to Q and honors the floors") {
    Engine rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
      const int q = 2 + static_cast<int>(uniform_index(rng, 80));
      const double lo = 1.0 / q;
      const double r = uniform_real(rng, 0.0, 1.0 - 2 * lo);
      const double a = uniform_real(rng, lo, 1.0 - r - lo);
      const QueryFractions f{a, 1.0 - r - a, r, 0};
      auto c = allocate_counts(f, q);
      REQUIRE(c.total() == q);
      CHECK(c.anomalous[0] + c.anomalous[1] >= 1);
      CHECK(c.uncertain[0] + c.uncertain[1] >= 1);
      for (int v : {c.anomalous[0], c.anomalous[1], c.uncertain[0], c.uncertain[1], c.random}) CHECK(v >= 0);
    }
  }

  TEST_CASE("batch: Q distinct rows from the pool, flags and counts agree") {
    Engine rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      auto pool = random_pool(60 + uniform_index(rng, 40), rng, uniform01(rng));
      const double r = uniform01(rng) * 0.9;
      const double a = (1 - r) * uniform01(rng);
      const auto counts = allocate_counts({a, 1 - r - a, r, 0}, 20);
      Engine draw(trial);
      auto b = build_query_batch(pool.view(), counts, draw);
      REQUIRE(b.size() == 20);
      std::set<std::size_t> rows;
      for (const auto& item : b.items) {
        rows.insert(item.index);
        CHECK(std::find(pool.idx.begin(), pool.idx.end(), item.index) != pool.idx.end());
        CHECK((item.anomalous || item.uncertain || item.random));
        CHECK(!(item.random && (item.anomalous || item.uncertain)));
      }
      CHECK(rows.size() == 20);
      CHECK(b.q_a == counts.anomalous[0] + counts.anomalous[1]);
      CHECK(b.q_z == counts.uncertain[0] + counts.uncertain[1]);
    }
  }

  TEST_CASE("top-k property against exhaustive comparison") {
    Engine rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      auto pool = random_pool(30, rng);
      QueryCounts c;
      c.anomalous = {3, 2};
      c.uncertain = {2, 3};
      c.random = 2;
      Engine draw(trial);
      auto b = build_query_batch(pool.view(), c, draw);
      std::array<int, 2> avail{};
      for (auto y : pool.pred) ++avail[y];
      if (avail[0] < 3 || avail[1] < 3) continue;  // shortfall case covered below
      for (const auto& item : b.items) {
        const std::size_t pos = static_cast<std::size_t>(
            std::find(pool.idx.begin(), pool.idx.end(), item.index) - pool.idx.begin());
        for (std::size_t j = 0; j < pool.idx.size(); ++j) {
          if (pool.pred[j] != pool.pred[pos]) continue;
          const bool chosen_a = std::any_of(b.items.begin(), b.items.end(),
                                            [&](const QueryItem& o) { return o.index == pool.idx[j] && o.anomalous; });
          const bool chosen_z = std::any_of(b.items.begin(), b.items.end(),
                                            [&](const QueryItem& o) { return o.index == pool.idx[j] && o.uncertain; });
          if (item.anomalous && !chosen_a) CHECK(pool.anomaly[pos] >= pool.anomaly[j]);
          if (item.uncertain && !chosen_z) CHECK(pool.certainty[pos] <= pool.certainty[j]);
        }
      }
    }
  }

  TEST_CASE("shortfall is filled from the other class") {
    Pool p;
    for (std::size_t i = 0; i < 30; ++i) {
      p.idx.push_back(i);
      p.prob.push_back(0.6 + 0.01 * i);
      p.pred.push_back(1);
      p.anomaly.push_back(0.01 * i);
      p.certainty.push_back(certainty_score(p.prob.back()));
    }
    QueryCounts c;
    c.anomalous = {5, 0};
    Engine rng(1);
    auto b = build_query_batch(p.view(), c, rng);
    REQUIRE(b.size() == 5);
    std::set<std::size_t> got;
    for (const auto& item : b.items) {
      got.insert(item.index);
      CHECK(item.anomalous);
    }
    CHECK(got == std::set<std::size_t>{25, 26, 27, 28, 29});
  }

  TEST_CASE("an item both anomalous and uncertain is queried once and counted twice") {
    Pool p;
    for (std::size_t i = 0; i < 10; ++i) {
      p.idx.push_back(i);
      p.prob.push_back(i == 4 ? 0.5 : 0.05);
      p.pred.push_back(i == 4 ? 1 : 0);
      p.anomaly.push_back(i == 4 ? 0.9 : 0.1);
      p.certainty.push_back(certainty_score(p.prob.back()));
    }
    QueryCounts c;
    c.anomalous = {0, 1};
    c.uncertain = {0, 1};
    c.random = 1;
    Engine rng(3);
    auto b = build_query_batch(p.view(), c, rng);
    CHECK(b.size() == 3);
    CHECK(b.q_a == 1);
    CHECK(b.q_z == 1);
    CHECK(b.items[0].index == 4);
    CHECK(b.items[0].anomalous);
    CHECK(b.items[0].uncertain);
    CHECK(b.q_r == 2);
  }

  TEST_CASE("minimal shares at Q=40 give 1 + 1 + 38 without overlap") {
    Engine rng(4);
    auto pool = random_pool(200, rng);
    auto c = allocate_counts({1.0 / 40, 1.0 / 40, 38.0 / 40, 0}, 40);
    auto b = build_query_batch(pool.view(), c, rng);
    CHECK(b.size() == 40);
    if (b.q_a + b.q_z + b.q_r == 40) {
      CHECK(b.q_a == 1);
      CHECK(b.q_z == 1);
      CHECK(b.q_r == 38);
    }
  }

  TEST_CASE("static fractions and random batches") {
    auto basic = allocate_counts(static_fractions(StaticQuery::kBasic5050), 40);
    CHECK(basic.anomalous[0] + basic.anomalous[1] == 20);
    CHECK(basic.uncertain[0] + basic.uncertain[1] == 20);
    auto anom = allocate_counts(static_fractions(StaticQuery::kAnomOnly), 40);
    CHECK(anom.anomalous == std::array<int, 2>{20, 20});
    CHECK(anom.random == 0);
    auto uncert = allocate_counts(static_fractions(StaticQuery::kUncertOnly), 40);
    CHECK(uncert.uncertain == std::array<int, 2>{20, 20});
    IndexList idx(50);
    for (std::size_t i = 0; i < 50; ++i) idx[i] = i;
    Engine rng(1);
    auto b = random_batch(idx, {}, {}, 40, rng);
    CHECK(b.size() == 40);
    CHECK(b.q_r == 40);
    for (const auto& item : b.items) CHECK(item.random);
    CHECK_THROWS_AS(random_batch(idx, {}, {}, 51, rng), PoolExhaustedError);
  }

  TEST_CASE("pool smaller than the batch") {
    Engine rng(1);
    auto pool = random_pool(5, rng);
    auto c = allocate_counts({0.5, 0.5, 0, 0}, 10);
    CHECK_THROWS_AS(build_query_batch(pool.view(), c, rng), PoolExhaustedError);
  }
}
