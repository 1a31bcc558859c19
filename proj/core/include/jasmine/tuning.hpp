#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasmine/alpha_dynamics.hpp"
#include "jasmine/classifier.hpp"
#include "jasmine/config.hpp"
#include "jasmine/dataset.hpp"

namespace jasmine {

class TuningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discrete GBM grid. Combination i decodes in mixed radix, ntrees fastest.
struct GbmSearchSpace {
  std::vector<int> ntrees;
  std::vector<int> max_depth;
  std::vector<double> learn_rate;
  std::vector<double> learn_rate_annealing;
  std::vector<double> sample_rate;
  std::vector<double> col_sample_rate;
  std::vector<double> col_sample_rate_per_tree;
  std::vector<double> col_sample_rate_change_per_level;
  std::vector<int> min_rows;
  std::vector<int> nbins;
  std::vector<int> nbins_cats;

  std::size_t size() const;
  GbmHyperParams at(std::size_t index) const;

  /// The published ranges (3^11 combinations).
  static GbmSearchSpace paper();
  /// Same ranges with smaller ensembles: ntrees {25, 50, 100}, max_depth {3, 5, 8}.
  static GbmSearchSpace desk();
  static GbmSearchSpace named(std::string_view name);
};

struct TuneResult {
  std::size_t combo = 0;  ///< index into the search space
  GbmHyperParams params;
  double metric = 0.0;    ///< k-fold CV F1
  double seconds = 0.0;   ///< wall time of the CV
  std::uint64_t work = 0; ///< machine-independent cost of the CV
  double cost = 0.0;      ///< the time used for selection (seconds or work)
  std::optional<double> d_value;
  bool chosen = false;
};

/// Best-metric combination (ties to the smaller cost), replaced by the
/// cheaper combination with the smallest d_j = (h* - h_j) / (t* - t_j) when
/// that is below epsilon. Reads `metric` and `cost`; fills `d_value` of every
/// cheaper candidate. Returns the chosen position.
std::size_t select_tradeoff(std::vector<TuneResult>& results, double epsilon);

struct GbmTuneBudget {
  int max_combos = 60;
  double seconds = 600.0;  ///< wall budget; ignored for TuneTiming::kWork
  TuneTiming timing = TuneTiming::kWall;
};

struct GbmTuneReport {
  std::vector<TuneResult> results;  ///< in evaluation order
  std::size_t chosen = 0;
  GbmHyperParams params;
};

/// Random search without replacement over `space`, scoring each combination by
/// k-fold CV F1 on the pool. Throws DegeneratePoolError for a single-class
/// pool and TuningError when no combination could be evaluated.
GbmTuneReport tune_gbm(const TrainingPool& pool, const GbmSearchSpace& space, const GbmTuneBudget& budget,
                       double epsilon, int k, std::uint64_t seed);

struct JasmineGrid {
  std::vector<double> alpha_a0;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> tau;

  std::size_t size() const { return alpha_a0.size() * beta.size() * gamma.size() * tau.size(); }
  JasmineParams at(std::size_t index) const;  ///< tau fastest, then gamma, beta, alpha_a0
  static JasmineGrid paper();
};

/// Q_J = min(floor(U_J / 4), Q).
int tuning_query_size(std::size_t unlabeled, int q);
/// T_J = ceil(U_J / Q_J) - 1.
int tuning_iterations(std::size_t unlabeled, int q_j);

/// Split of L(0) for Jasmine tuning. Indices are positions within L(0).
struct JasmineTunePartition {
  IndexList labeled;
  IndexList unlabeled;
  IndexList evaluation;
  int q = 0;
  int iterations = 0;
};

/// Stratified 40/40/20 split of L(0) positions; retries with fresh draws when
/// the labeled part misses a class. Throws TuningError if every attempt does.
JasmineTunePartition make_tune_partition(std::span<const Label> labels, int q, std::uint64_t seed,
                                         int attempts = 16);

struct JasmineTuneRow {
  std::size_t combo = 0;
  JasmineParams params;
  std::vector<double> areas;  ///< one per tuning simulation
  double mean_area = 0.0;
  bool chosen = false;
};

struct JasmineTuneReport {
  std::vector<JasmineTuneRow> rows;
  std::size_t chosen = 0;
  JasmineParams params;
  std::vector<JasmineTunePartition> partitions;
};

struct JasmineTuneSettings {
  int q = 40;
  int sims = 4;  ///< S_J
  int folds = 5;
  GbmHyperParams gbm;
  IsolationForestParams iforest;
  JasmineGrid grid = JasmineGrid::paper();
};

/// Inner active-learning runs on copies of the L(0) rows only. For every
/// partition and combination, T_J - 1 batches are queried, F1 on E_J is
/// recorded at t = 0..T_J-1 and the trapezoidal area averaged over the S_J
/// partitions; the largest mean area wins (ties to the lower combo index).
JasmineTuneReport jasmine_tune(const Dataset& data, std::span<const std::size_t> initial_labeled,
                               const JasmineTuneSettings& settings, std::uint64_t seed);

/// CSV renderings of the reports.
std::string gbm_tune_csv(const GbmTuneReport& report);
std::string jasmine_tune_csv(const JasmineTuneReport& report);

}  // namespace jasmine
