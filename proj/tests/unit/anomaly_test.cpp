#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "jasmine/anomaly.hpp"
#include "jasmine/random.hpp"

using namespace jasmine;

namespace {

FeatureMatrix gaussian_rows(std::size_t n, std::size_t k, std::uint64_t seed, double outlier = 0.0) {
  Engine rng(seed);
  std::vector<double> v;
  for (std::size_t i = 0; i < n * k; ++i) v.push_back(standard_normal(rng));
  if (outlier != 0.0) {
    for (std::size_t j = 0; j < k; ++j) v[(n - 1) * k + j] = outlier;
  }
  return FeatureMatrix(n, k, std::move(v));
}

IndexList iota(std::size_t n) {
  IndexList out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace

TEST_SUITE("anomaly") {
  TEST_CASE("average path length") {
    CHECK(average_path_length(0) == 0.0);
    CHECK(average_path_length(1) == 0.0);
    CHECK(average_path_length(2) == 1.0);
    // 2 H(n-1) - 2 (n-1)/n with H(k) = ln k + Euler-Mascheroni
    const double n = 256;
    CHECK(average_path_length(256) == doctest::Approx(2.0 * (std::log(n - 1) + 0.5772156649) - 2.0 * (n - 1) / n));
  }

  TEST_CASE("split_by_class routes labeled by truth and unlabeled by prediction") {
    IndexList labeled{10, 11};
    std::vector<Label> labels{0, 1};
    IndexList unlabeled{12};
    std::vector<Label> predicted{1};
    auto p = split_by_class(labeled, labels, unlabeled, predicted);
    CHECK(p.benign == IndexList{10});
    CHECK(p.malicious == IndexList{11, 12});
    auto q = split_by_class(labeled, labels, {}, {});
    CHECK(q.benign == IndexList{10});
    CHECK(q.malicious == IndexList{11});
  }

  TEST_CASE("forest is seeded and splits stay inside the data range") {
    auto x = gaussian_rows(500, 3, 1);
    auto rows = iota(500);
    auto a = IsolationForest::train(x, rows, {50, 128}, 4);
    auto b = IsolationForest::train(x, rows, {50, 128}, 4);
    for (std::size_t i = 0; i < 20; ++i) CHECK(a.score(x.row(i)) == b.score(x.row(i)));
    double lo = 1e300, hi = -1e300;
    for (double v : x.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (const auto& tree : a.trees()) {
      for (const auto& node : tree) {
        if (node.feature >= 0) {
          CHECK(node.split >= lo);
          CHECK(node.split <= hi);
        }
      }
    }
    for (std::size_t i = 0; i < 500; ++i) {
      const double s = a.score(x.row(i));
      CHECK(s > 0.0);
      CHECK(s <= 1.0);
    }
  }

  TEST_CASE("uniform data scores near one half") {
    Engine rng(2);
    std::vector<double> v;
    for (int i = 0; i < 10000 * 2; ++i) v.push_back(uniform01(rng));
    FeatureMatrix x(10000, 2, v);
    auto rows = iota(10000);
    auto f = IsolationForest::train(x, rows, {100, 256}, 8);
    double mean = 0.0;
    for (std::size_t i = 0; i < 10000; ++i) mean += f.score(x.row(i));
    mean /= 10000.0;
    CHECK(mean >= 0.35);
    CHECK(mean <= 0.55);
  }

  TEST_CASE("a far outlier outranks the inliers") {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto x = gaussian_rows(1001, 4, 100 + seed, 100.0);
      auto rows = iota(1001);
      auto f = IsolationForest::train(x, rows, {100, 256}, seed);
      std::vector<double> inliers;
      for (std::size_t i = 0; i < 1000; ++i) inliers.push_back(f.score(x.row(i)));
      std::sort(inliers.begin(), inliers.end());
      wins += f.score(x.row(1000)) > inliers[949];
    }
    CHECK(wins >= 19);
  }

  TEST_CASE("a point in the densest region scores below one half") {
    auto x = gaussian_rows(2000, 2, 5);
    auto f = IsolationForest::train(x, iota(2000), {100, 256}, 5);
    std::vector<double> center{0.0, 0.0};
    CHECK(f.score(center) < 0.5);
  }

  TEST_CASE("degenerate and constant forests") {
    auto x = gaussian_rows(5, 2, 1);
    IndexList one{0};
    CHECK_THROWS_AS(IsolationForest::train(x, one, {}, 1), DegenerateModelError);
    auto c = IsolationForest::constant();
    CHECK(c.degenerate());
    CHECK(c.score(x.row(0)) == 0.5);
  }

  TEST_CASE("class forests route by predicted class") {
    auto x = gaussian_rows(400, 2, 6);
    ClassConditionalPools pools;
    for (std::size_t i = 0; i < 400; ++i) (i < 200 ? pools.benign : pools.malicious).push_back(i);
    auto forests = train_class_forests(x, pools, {50, 128}, 3);
    std::vector<double> p{1.0, -1.0};
    CHECK(forests.anomaly_score(p, 0) == forests.benign.score(p));
    CHECK(forests.anomaly_score(p, 1) == forests.malicious.score(p));
    pools.malicious = {399};
    auto half = train_class_forests(x, pools, {50, 128}, 3);
    CHECK(half.malicious.degenerate());
    CHECK(half.anomaly_score(p, 1) == 0.5);
  }

  TEST_CASE("gaussian rank score") {
    auto x = gaussian_rows(300, 3, 9);
    auto rows = iota(300);
    auto g = GaussianAnomalyModel::train(x, rows);
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < 300; ++i) {
      for (std::size_t j = 0; j < 3; ++j) mean[j] += x.at(i, j) / 300.0;
    }
    CHECK(g.score(mean) == doctest::Approx(1.0 / 301.0));
    auto far = mean;
    far[1] += 10.0 * 1.5;
    CHECK(g.score(far) == 1.0);
    // rank transform: training scores are 1/(n+1) .. n/(n+1), each once
    std::vector<double> s;
    for (std::size_t i = 0; i < 300; ++i) s.push_back(g.score(x.row(i)));
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < 300; ++i) CHECK(s[i] == doctest::Approx((i + 1) / 301.0));
    CHECK(GaussianAnomalyModel::constant().score(mean) == 0.5);
  }
}
