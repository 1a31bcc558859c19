#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jasmine/alpha_dynamics.hpp"
#include "jasmine/anomaly.hpp"
#include "jasmine/classifier.hpp"
#include "jasmine/dataset.hpp"

namespace jasmine {

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Method { kJasMain, kJasBasic, kJasAnom, kJasUncert, kJasRand, kAlaMain };

std::string method_name(Method m);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

enum class TuneTiming { kWall, kWork };

struct DatasetConfig {
  std::string kind = "synthetic";  ///< nslkdd | nslkdd-rand | unsw | csv | synthetic
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  std::filesystem::path data_path;
  std::filesystem::path manifest;  ///< csv kind only; defaults to the synthetic manifest
  SyntheticSpec synthetic;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::size_t initial_labeled = 125;  ///< L(0)
  std::size_t evaluation = 5000;      ///< E (ignored for nslkdd's fixed test set)
  int q = 40;
  int n = 15000;
  int sims = 30;
  int folds = 5;
  std::uint64_t seed = 1;
  std::filesystem::path out = "runs/latest";
  std::vector<Method> methods = all_methods();

  JasmineParams jasmine;
  bool tune_jasmine = false;
  int jasmine_tune_sims = 4;

  GbmHyperParams gbm;
  bool tune_gbm = false;
  double gbm_tune_seconds = 600.0;
  int gbm_tune_max_combos = 60;
  double gbm_epsilon = 1e-4;
  TuneTiming gbm_timing = TuneTiming::kWall;
  std::string gbm_space = "desk";  ///< desk | paper

  IsolationForestParams iforest;
  LogRegParams logreg;

  int iterations() const { return n / q; }  ///< T = floor(N / Q)

  void validate() const;

  /// Apply one `key = value` setting. Throws ConfigError naming the key.
  void set(std::string_view key, std::string_view value);

  /// Apply every `key = value` line of `text` on top of this config.
  void apply(std::string_view text);

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Canonical `key = value` text; parse(serialize()) reproduces the config.
  std::string serialize() const;
  std::uint64_t hash() const;

  /// Presets: "smoke" (seconds, synthetic), "desk" (scaled-down NSL-KDD) and
  /// "paper" (full-size NSL-KDD protocol, 30 sims of 15,000 labels).
  static ExperimentConfig preset(std::string_view scale);
};

struct LoadedData {
  Dataset data;
  std::optional<IndexList> fixed_eval;  ///< nslkdd: the provided test rows
};

/// Load the configured dataset. For `unsw`, a directory path loads and
/// concatenates every *.csv inside in name order.
LoadedData load_dataset(const DatasetConfig& config);

/// Fill empty file paths from a data directory: KDDTrain+ / KDDTest+ (.txt or
/// .csv) for the NSL-KDD kinds, UNSW-NB15 files (or the directory itself) for
/// unsw. Paths already set are kept.
DatasetConfig resolve_data_paths(DatasetConfig config, const std::filesystem::path& data_dir);

/// The data directory: $JASMINE_DATA_DIR when set, otherwise "data".
std::filesystem::path default_data_dir();

}  // namespace jasmine
