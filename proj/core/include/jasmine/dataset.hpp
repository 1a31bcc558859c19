#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasmine/manifest.hpp"

namespace jasmine {

/// Raised for malformed input files; the message names the offending row.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of finite reals.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

using Label = std::uint8_t;
using IndexList = std::vector<std::size_t>;

struct Dataset {
  std::string name;
  FeatureMatrix features;
  std::vector<Label> labels;
  std::vector<std::string> feature_names;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return features.cols(); }
  double malicious_fraction() const;

  /// Copy of the listed rows, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Throws DataError unless every value is finite, labels are binary and
  /// dimensions agree.
  void validate() const;
};

/// Load a CSV according to a manifest. A first line with no numeric field is
/// treated as a header; otherwise the manifest's positional schema applies.
Dataset load_csv(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Parse CSV text directly (used by the loaders and tests).
Dataset parse_csv(std::string_view text, const DatasetManifest& manifest, std::string name);

struct NslKddPair {
  Dataset train;
  Dataset test;
};

NslKddPair load_nslkdd(const std::filesystem::path& train_path,
                       const std::filesystem::path& test_path);
Dataset load_unsw(const std::filesystem::path& path);

/// Train rows followed by test rows; schemas must match.
Dataset build_nslkdd_rand(const Dataset& train, const Dataset& test);

struct PoolPartition {
  IndexList labeled;
  IndexList unlabeled;
  IndexList evaluation;
  std::uint64_t seed = 0;
};

/// Uniform random disjoint split driven only by `seed`. With `fixed_eval`, the
/// evaluation set is taken as given (and excluded from sampling); E is ignored.
PoolPartition partition(std::size_t rows, std::size_t initial_labeled, std::size_t evaluation,
                        const std::optional<IndexList>& fixed_eval, std::uint64_t seed);

/// Gaussian-cluster stand-in for intrusion data: a benign bulk, several
/// malicious clusters and a few sparse rare-attack clusters.
struct SyntheticSpec {
  std::size_t rows = 2000;
  std::size_t features = 8;
  double malicious_fraction = 0.4;
  double separation = 3.0;
  std::uint64_t seed = 1;
};
Dataset make_synthetic(const SyntheticSpec& spec);

/// Write in a header-bearing CSV understood by the `synthetic` manifest.
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace jasmine
