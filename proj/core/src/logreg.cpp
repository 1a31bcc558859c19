#include <cmath>

#include "jasmine/classifier.hpp"

namespace jasmine {

double LogRegModel::predict_raw(std::span<const double> row) const {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * (row[j] - mean[j]) / scale[j];
  return 1.0 / (1.0 + std::exp(-z));
}

// Full-batch gradient descent on standardized features; starts from all-zero
// weights so zero iterations predict 0.5 everywhere.
LogRegModel fit_logreg(const TrainingPool& pool, const LogRegParams& params) {
  if (pool.size() == 0) throw std::invalid_argument("logreg: empty pool");
  const auto& X = *pool.features;
  const std::size_t n = pool.size();
  const std::size_t k = X.cols();
  LogRegModel m;
  m.mean.assign(k, 0.0);
  m.scale.assign(k, 0.0);
  m.weights.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = X.row(pool.rows[i]);
    for (std::size_t j = 0; j < k; ++j) m.mean[j] += r[j];
  }
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = X.row(pool.rows[i]);
    for (std::size_t j = 0; j < k; ++j) m.scale[j] += (r[j] - m.mean[j]) * (r[j] - m.mean[j]);
  }
  for (auto& v : m.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v < 1e-12) v = 1.0;
  }

  std::vector<double> z(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = X.row(pool.rows[i]);
    for (std::size_t j = 0; j < k; ++j) z[i * k + j] = (r[j] - m.mean[j]) / m.scale[j];
  }
  std::vector<double> gw(k);
  for (int it = 0; it < params.iters; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = m.bias;
      for (std::size_t j = 0; j < k; ++j) s += m.weights[j] * z[i * k + j];
      const double err = 1.0 / (1.0 + std::exp(-s)) - static_cast<double>(pool.labels[i]);
      for (std::size_t j = 0; j < k; ++j) gw[j] += err * z[i * k + j];
      gb += err;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < k; ++j) {
      m.weights[j] -= params.step * (gw[j] * inv + params.l2 * m.weights[j]);
    }
    m.bias -= params.step * gb * inv;
  }
  return m;
}

}  // namespace jasmine
