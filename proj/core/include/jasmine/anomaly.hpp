#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "jasmine/dataset.hpp"

namespace jasmine {

class DegenerateModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Average unsuccessful-search path length of a BST with n nodes.
double average_path_length(std::size_t n);

struct IsolationForestParams {
  int n_trees = 100;
  int subsample = 256;
};

class IsolationForest {
 public:
  /// Throws DegenerateModelError for fewer than two rows.
  static IsolationForest train(const FeatureMatrix& features, std::span<const std::size_t> rows,
                               const IsolationForestParams& params, std::uint64_t seed);
  /// Forest that scores every point 0.5; stands in for a degenerate pool.
  static IsolationForest constant();

  /// 2^(-E[h(x)] / c(psi)), in (0, 1].
  double score(std::span<const double> row) const;
  double expected_path_length(std::span<const double> row) const;

  bool degenerate() const { return trees_.empty(); }
  std::size_t subsample_size() const { return subsample_; }
  std::size_t tree_count() const { return trees_.size(); }

  struct Node {
    int feature = -1;   ///< -1 marks an external node
    double split = 0.0; ///< x < split goes left
    int left = -1;
    int right = -1;
    std::uint32_t size = 0;  ///< training points reaching an external node
  };
  using Tree = std::vector<Node>;
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
  std::size_t subsample_ = 0;
};

/// Per-class index pools for the two forests: labeled rows by true label,
/// unlabeled rows by predicted class.
struct ClassConditionalPools {
  IndexList benign;
  IndexList malicious;
};

ClassConditionalPools split_by_class(std::span<const std::size_t> labeled,
                                     std::span<const Label> labels,
                                     std::span<const std::size_t> unlabeled,
                                     std::span<const Label> predicted);

struct ClassForests {
  IsolationForest benign;
  IsolationForest malicious;

  /// Score from the forest matching `predicted_class`.
  double anomaly_score(std::span<const double> row, Label predicted_class) const;
};

/// Train both forests; a pool with fewer than two rows yields the constant
/// forest.
ClassForests train_class_forests(const FeatureMatrix& features, const ClassConditionalPools& pools,
                                 const IsolationForestParams& params, std::uint64_t seed);

/// Independent per-feature Gaussian likelihood; scores are the rank of the
/// negative log-likelihood among training rows, mapped into (0, 1].
class GaussianAnomalyModel {
 public:
  static GaussianAnomalyModel train(const FeatureMatrix& features, std::span<const std::size_t> rows);
  static GaussianAnomalyModel constant();

  double negative_log_likelihood(std::span<const double> row) const;
  /// (#training NLL strictly below x's NLL + 1) / (n + 1).
  double score(std::span<const double> row) const;
  bool degenerate() const { return mean_.empty(); }

 private:
  std::vector<double> mean_;
  std::vector<double> var_;
  std::vector<double> train_nll_;  // sorted
};

}  // namespace jasmine
