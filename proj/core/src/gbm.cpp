#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "jasmine/classifier.hpp"
#include "jasmine/random.hpp"

namespace jasmine {

void GbmHyperParams::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (ntrees < 1) throw std::invalid_argument("gbm: ntrees must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("gbm: max_depth must be >= 1");
  if (!in_unit(learn_rate)) throw std::invalid_argument("gbm: learn_rate must be in (0,1]");
  if (!in_unit(learn_rate_annealing)) {
    throw std::invalid_argument("gbm: learn_rate_annealing must be in (0,1]");
  }
  if (!in_unit(sample_rate)) throw std::invalid_argument("gbm: sample_rate must be in (0,1]");
  if (!in_unit(col_sample_rate)) throw std::invalid_argument("gbm: col_sample_rate must be in (0,1]");
  if (!in_unit(col_sample_rate_per_tree)) {
    throw std::invalid_argument("gbm: col_sample_rate_per_tree must be in (0,1]");
  }
  if (!(col_sample_rate_change_per_level > 0.0 && col_sample_rate_change_per_level <= 2.0)) {
    throw std::invalid_argument("gbm: col_sample_rate_change_per_level must be in (0,2]");
  }
  if (min_rows < 1) throw std::invalid_argument("gbm: min_rows must be >= 1");
  if (nbins < 2) throw std::invalid_argument("gbm: nbins must be >= 2");
}

std::string GbmHyperParams::describe() const {
  std::ostringstream out;
  out << "ntrees=" << ntrees << " max_depth=" << max_depth << " learn_rate=" << learn_rate
      << " learn_rate_annealing=" << learn_rate_annealing << " sample_rate=" << sample_rate
      << " col_sample_rate=" << col_sample_rate << " col_sample_rate_per_tree=" << col_sample_rate_per_tree
      << " col_sample_rate_change_per_level=" << col_sample_rate_change_per_level << " min_rows=" << min_rows
      << " nbins=" << nbins;
  for (const auto& [k, v] : extra) out << ' ' << k << '=' << v << "(ignored)";
  return out.str();
}

double RegressionTree::evaluate(std::span<const double> row) const {
  int n = 0;
  while (nodes[n].feature >= 0) {
    const auto& node = nodes[n];
    n = row[node.feature] < node.threshold ? node.left : node.right;
  }
  return nodes[n].value;
}

double GbmModel::raw_margin(std::span<const double> row) const {
  double f = init_score;
  for (const auto& t : trees) f += t.rate * t.evaluate(row);
  return f;
}

double GbmModel::predict_raw(std::span<const double> row) const {
  return 1.0 / (1.0 + std::exp(-raw_margin(row)));
}

namespace {

constexpr double kMaxLeaf = 19.0;

struct Binned {
  std::vector<std::vector<double>> cuts;  // per feature, ascending
  std::vector<std::uint16_t> bins;        // column-major: feature * n + row
  std::size_t n = 0;

  std::uint16_t at(std::size_t feature, std::size_t row) const { return bins[feature * n + row]; }
};

// Equal-frequency cut points taken from training values. A row falls in bin b
// when exactly b cuts are <= its value.
Binned bin_pool(const TrainingPool& pool, int nbins) {
  const auto& X = *pool.features;
  Binned b;
  b.n = pool.size();
  const std::size_t k = X.cols();
  b.cuts.resize(k);
  b.bins.resize(k * b.n);
  std::vector<double> column(b.n);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < b.n; ++i) column[i] = X.at(pool.rows[i], j);
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> unique = sorted;
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    auto& cuts = b.cuts[j];
    if (unique.size() <= static_cast<std::size_t>(nbins)) {
      cuts.assign(unique.begin() + (unique.empty() ? 0 : 1), unique.end());
    } else {
      for (int q = 1; q < nbins; ++q) {
        double v = sorted[static_cast<std::size_t>(q) * b.n / static_cast<std::size_t>(nbins)];
        if (v > sorted.front() && (cuts.empty() || v > cuts.back())) cuts.push_back(v);
      }
    }
    for (std::size_t i = 0; i < b.n; ++i) {
      b.bins[j * b.n + i] = static_cast<std::uint16_t>(
          std::upper_bound(cuts.begin(), cuts.end(), column[i]) - cuts.begin());
    }
  }
  return b;
}

struct TreeBuilder {
  const Binned& binned;
  const std::vector<double>& grad;  // y - p
  const std::vector<double>& hess;  // p (1 - p)
  const GbmHyperParams& params;
  const std::vector<std::size_t>& tree_features;
  Engine& rng;
  std::uint64_t work = 0;
  RegressionTree tree;

  struct Hist {
    double g = 0.0;
    std::size_t count = 0;
  };

  int make_leaf(const std::vector<std::uint32_t>& rows) {
    double g = 0.0;
    double h = 0.0;
    for (auto r : rows) {
      g += grad[r];
      h += hess[r];
    }
    double value = h > 1e-12 ? g / h : 0.0;
    value = std::clamp(value, -kMaxLeaf, kMaxLeaf);
    tree.nodes.push_back({-1, 0.0, -1, -1, value});
    return static_cast<int>(tree.nodes.size() - 1);
  }

  int build(std::vector<std::uint32_t> rows, int depth) {
    const std::size_t n = rows.size();
    const std::size_t min_rows = static_cast<std::size_t>(params.min_rows);
    if (depth >= params.max_depth || n < 2 * min_rows) return make_leaf(rows);

    const std::size_t k = tree_features.size();
    const double level_rate = std::min(
        1.0, params.col_sample_rate * std::pow(params.col_sample_rate_change_per_level, depth));
    std::size_t m = static_cast<std::size_t>(std::lround(level_rate * static_cast<double>(k)));
    m = std::clamp<std::size_t>(m, 1, k);
    std::vector<std::size_t> features;
    if (m == k) {
      features = tree_features;
    } else {
      for (std::size_t pick : sample_without_replacement(rng, k, m)) features.push_back(tree_features[pick]);
      std::sort(features.begin(), features.end());
    }

    double total_g = 0.0;
    for (auto r : rows) total_g += grad[r];
    const double parent = total_g * total_g / static_cast<double>(n);

    double best_gain = 1e-12;
    int best_feature = -1;
    std::size_t best_bin = 0;
    std::vector<Hist> hist;
    for (std::size_t f : features) {
      const auto& cuts = binned.cuts[f];
      if (cuts.empty()) continue;
      hist.assign(cuts.size() + 1, Hist{});
      work += n;
      for (auto r : rows) {
        auto& h = hist[binned.at(f, r)];
        h.g += grad[r];
        ++h.count;
      }
      double gl = 0.0;
      std::size_t nl = 0;
      for (std::size_t b = 0; b < cuts.size(); ++b) {
        gl += hist[b].g;
        nl += hist[b].count;
        const std::size_t nr = n - nl;
        if (nl < min_rows) continue;
        if (nr < min_rows) break;
        const double gr = total_g - gl;
        const double gain = gl * gl / static_cast<double>(nl) + gr * gr / static_cast<double>(nr) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_bin = b;
        }
      }
    }
    if (best_feature < 0) return make_leaf(rows);

    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (auto r : rows) {
      (binned.at(static_cast<std::size_t>(best_feature), r) <= best_bin ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({best_feature, binned.cuts[best_feature][best_bin], -1, -1, 0.0});
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

double log_loss(const std::vector<double>& margin, std::span<const Label> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const double f = margin[i];
    // log(1 + e^{-f}) for y=1, log(1 + e^{f}) for y=0, computed stably.
    const double s = y[i] ? -f : f;
    total += s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  }
  return total / static_cast<double>(margin.size());
}

}  // namespace

GbmModel fit_gbm(const TrainingPool& pool, const GbmHyperParams& params, std::uint64_t seed,
                 std::vector<double>* loss_trace, std::uint64_t* work) {
  params.validate();
  if (pool.size() == 0) throw std::invalid_argument("gbm: empty pool");
  const std::size_t n = pool.size();
  const double prior = std::clamp(static_cast<double>(pool.positives()) / static_cast<double>(n), 1e-6, 1.0 - 1e-6);

  GbmModel model;
  model.width = pool.features->cols();
  model.init_score = std::log(prior / (1.0 - prior));

  const Binned binned = bin_pool(pool, params.nbins);
  std::vector<double> margin(n, model.init_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  if (loss_trace) loss_trace->push_back(log_loss(margin, pool.labels));

  const SeedPath root(seed);
  double rate = params.learn_rate;
  for (int m = 0; m < params.ntrees; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-margin[i]));
      grad[i] = static_cast<double>(pool.labels[i]) - p;
      hess[i] = p * (1.0 - p);
    }
    Engine rng = root.with(static_cast<std::uint64_t>(m)).engine();
    std::vector<std::uint32_t> rows;
    rows.reserve(n);
    if (params.sample_rate < 1.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (uniform01(rng) < params.sample_rate) rows.push_back(static_cast<std::uint32_t>(i));
      }
    }
    if (rows.size() < 2) {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0u);
    }
    const std::size_t k = binned.cuts.size();
    std::size_t m_tree = static_cast<std::size_t>(std::lround(params.col_sample_rate_per_tree * static_cast<double>(k)));
    m_tree = std::clamp<std::size_t>(m_tree, 1, k);
    std::vector<std::size_t> tree_features(k);
    std::iota(tree_features.begin(), tree_features.end(), 0);
    if (m_tree < k) {
      tree_features = sample_without_replacement(rng, k, m_tree);
      std::sort(tree_features.begin(), tree_features.end());
    }
    TreeBuilder builder{binned, grad, hess, params, tree_features, rng, 0, {}};
    builder.build(std::move(rows), 0);
    builder.tree.rate = rate;
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += rate * builder.tree.evaluate(pool.features->row(pool.rows[i]));
    }
    if (work) *work += builder.work + 2 * n;
    model.trees.push_back(std::move(builder.tree));
    if (loss_trace) loss_trace->push_back(log_loss(margin, pool.labels));
    rate *= params.learn_rate_annealing;
  }
  return model;
}

}  // namespace jasmine
