#include <algorithm>
#include <cmath>

#include "jasmine/anomaly.hpp"
#include "jasmine/random.hpp"

namespace jasmine {

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  constexpr double kEulerGamma = 0.5772156649015329;
  const double m = static_cast<double>(n - 1);
  return 2.0 * (std::log(m) + kEulerGamma) - 2.0 * m / static_cast<double>(n);
}

namespace {

struct Builder {
  const FeatureMatrix& X;
  int height_limit;
  Engine& rng;
  IsolationForest::Tree tree;

  int external(std::size_t size) {
    tree.push_back({-1, 0.0, -1, -1, static_cast<std::uint32_t>(size)});
    return static_cast<int>(tree.size() - 1);
  }

  int build(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    if (depth >= height_limit || n <= 1) return external(n);
    // Pick uniformly among features that still vary in this node.
    const std::size_t k = X.cols();
    std::vector<std::size_t> varying;
    std::vector<double> lo(k), hi(k);
    for (std::size_t j = 0; j < k; ++j) {
      lo[j] = hi[j] = X.at(rows[begin], j);
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = X.at(rows[i], j);
        lo[j] = std::min(lo[j], v);
        hi[j] = std::max(hi[j], v);
      }
      if (hi[j] > lo[j]) varying.push_back(j);
    }
    if (varying.empty()) return external(n);
    const std::size_t f = varying[uniform_index(rng, varying.size())];
    double split = uniform_real(rng, lo[f], hi[f]);
    if (split <= lo[f]) split = std::nextafter(lo[f], hi[f]);
    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](std::size_t r) { return X.at(r, f) < split; });
    const std::size_t m = static_cast<std::size_t>(mid - rows.begin());
    const int id = static_cast<int>(tree.size());
    tree.push_back({static_cast<int>(f), split, -1, -1, 0});
    const int l = build(rows, begin, m, depth + 1);
    const int r = build(rows, m, end, depth + 1);
    tree[id].left = l;
    tree[id].right = r;
    return id;
  }
};

}  // namespace

IsolationForest IsolationForest::train(const FeatureMatrix& features, std::span<const std::size_t> rows,
                                       const IsolationForestParams& params, std::uint64_t seed) {
  if (rows.size() < 2) throw DegenerateModelError("isolation forest needs at least two rows");
  if (params.n_trees < 1 || params.subsample < 2) {
    throw std::invalid_argument("isolation forest: n_trees >= 1 and subsample >= 2 required");
  }
  IsolationForest forest;
  forest.subsample_ = std::min<std::size_t>(static_cast<std::size_t>(params.subsample), rows.size());
  const int height = static_cast<int>(std::ceil(std::log2(static_cast<double>(forest.subsample_))));
  const SeedPath root(seed);
  for (int t = 0; t < params.n_trees; ++t) {
    Engine rng = root.with(static_cast<std::uint64_t>(t)).engine();
    auto picks = sample_without_replacement(rng, rows.size(), forest.subsample_);
    std::vector<std::size_t> sample;
    sample.reserve(picks.size());
    for (auto p : picks) sample.push_back(rows[p]);
    Builder b{features, height, rng, {}};
    b.build(sample, 0, sample.size(), 0);
    forest.trees_.push_back(std::move(b.tree));
  }
  return forest;
}

IsolationForest IsolationForest::constant() { return IsolationForest{}; }

double IsolationForest::expected_path_length(std::span<const double> row) const {
  double total = 0.0;
  for (const auto& tree : trees_) {
    int n = 0;
    int depth = 0;
    while (tree[n].feature >= 0) {
      n = row[tree[n].feature] < tree[n].split ? tree[n].left : tree[n].right;
      ++depth;
    }
    total += depth + average_path_length(tree[n].size);
  }
  return trees_.empty() ? 0.0 : total / static_cast<double>(trees_.size());
}

double IsolationForest::score(std::span<const double> row) const {
  if (degenerate()) return 0.5;
  const double c = average_path_length(subsample_);
  return std::exp2(-expected_path_length(row) / c);
}

ClassConditionalPools split_by_class(std::span<const std::size_t> labeled,
                                     std::span<const Label> labels,
                                     std::span<const std::size_t> unlabeled,
                                     std::span<const Label> predicted) {
  if (labeled.size() != labels.size() || unlabeled.size() != predicted.size()) {
    throw std::invalid_argument("split_by_class: size mismatch");
  }
  ClassConditionalPools pools;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    (labels[i] ? pools.malicious : pools.benign).push_back(labeled[i]);
  }
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    (predicted[i] ? pools.malicious : pools.benign).push_back(unlabeled[i]);
  }
  return pools;
}

double ClassForests::anomaly_score(std::span<const double> row, Label predicted_class) const {
  return predicted_class ? malicious.score(row) : benign.score(row);
}

ClassForests train_class_forests(const FeatureMatrix& features, const ClassConditionalPools& pools,
                                 const IsolationForestParams& params, std::uint64_t seed) {
  auto fit = [&](const IndexList& rows, std::string_view tag) {
    if (rows.size() < 2) return IsolationForest::constant();
    return IsolationForest::train(features, rows, params, SeedPath(seed).with(tag).seed());
  };
  return {fit(pools.benign, "benign"), fit(pools.malicious, "malicious")};
}

}  // namespace jasmine
