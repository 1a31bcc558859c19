#include <algorithm>
#include <cmath>
#include <numbers>

#include "jasmine/anomaly.hpp"

namespace jasmine {

GaussianAnomalyModel GaussianAnomalyModel::train(const FeatureMatrix& features,
                                                 std::span<const std::size_t> rows) {
  if (rows.size() < 2) throw DegenerateModelError("gaussian anomaly model needs at least two rows");
  const std::size_t k = features.cols();
  const double n = static_cast<double>(rows.size());
  GaussianAnomalyModel m;
  m.mean_.assign(k, 0.0);
  m.var_.assign(k, 0.0);
  for (auto r : rows) {
    for (std::size_t j = 0; j < k; ++j) m.mean_[j] += features.at(r, j);
  }
  for (auto& v : m.mean_) v /= n;
  for (auto r : rows) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = features.at(r, j) - m.mean_[j];
      m.var_[j] += d * d;
    }
  }
  for (auto& v : m.var_) v = std::max(v / n, 1e-9);
  m.train_nll_.reserve(rows.size());
  for (auto r : rows) m.train_nll_.push_back(m.negative_log_likelihood(features.row(r)));
  std::sort(m.train_nll_.begin(), m.train_nll_.end());
  return m;
}

GaussianAnomalyModel GaussianAnomalyModel::constant() { return GaussianAnomalyModel{}; }

double GaussianAnomalyModel::negative_log_likelihood(std::span<const double> row) const {
  double nll = 0.0;
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double d = row[j] - mean_[j];
    nll += 0.5 * std::log(2.0 * std::numbers::pi * var_[j]) + d * d / (2.0 * var_[j]);
  }
  return nll;
}

double GaussianAnomalyModel::score(std::span<const double> row) const {
  if (degenerate()) return 0.5;
  const double nll = negative_log_likelihood(row);
  const auto below = std::lower_bound(train_nll_.begin(), train_nll_.end(), nll) - train_nll_.begin();
  return static_cast<double>(below + 1) / static_cast<double>(train_nll_.size() + 1);
}

}  // namespace jasmine
