#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jasmine/alpha_dynamics.hpp"
#include "jasmine/anomaly.hpp"
#include "jasmine/classifier.hpp"
#include "jasmine/config.hpp"
#include "jasmine/dataset.hpp"
#include "jasmine/query.hpp"
#include "jasmine/random.hpp"

namespace jasmine {

struct LearnerSettings {
  Method method = Method::kJasMain;
  int q = 40;
  int iterations = 1;  ///< T: query batches to run
  int folds = 5;
  JasmineParams jasmine;
  GbmHyperParams gbm;
  IsolationForestParams iforest;
  LogRegParams logreg;
};

struct IterationDeltas {
  double delta_a = 0.0;
  double delta_z = 0.0;
  double delta = 0.0;
  double delta_gamma = 0.0;
};

/// One row per labeled-set size. Row t holds the classifier trained on L(t),
/// its F1 on E, the fractions alpha(t) used for the next batch and, for t > 0,
/// the metrics of the batch that produced L(t).
struct IterationRecord {
  int t = 0;
  std::size_t labeled = 0;
  std::size_t labeled_positive = 0;
  std::optional<double> f1;  ///< absent when no evaluation set is configured
  QueryFractions fractions;
  std::optional<IterationDeltas> deltas;
  int q_a = 0;  ///< composition of the batch that produced L(t)
  int q_z = 0;
  int q_r = 0;
  bool degenerate = false;  ///< L(t) held a single class
  ClassifierKind kind = ClassifierKind::kConstant;
  double theta = 0.5;
};

enum class StopReason { kRunning, kCompleted, kPoolExhausted };

/// Raised by Learner::submit for a label vector that does not match the
/// pending batch; the learner state is unchanged.
class LabelMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The active-learning loop as a state machine. Construction trains on L(0)
/// and prepares the first batch; each submit() labels the pending batch,
/// updates fractions, moves the rows into L, retrains and prepares the next.
///
/// Only the labels of L(0) and submitted labels are used for training and
/// querying. Ground truth on the evaluation rows is read from `data` to score
/// F1.
class Learner {
 public:
  Learner(const Dataset& data, const PoolPartition& partition, std::span<const Label> initial_labels,
          LearnerSettings settings, SeedPath seeds);

  bool finished() const { return stop_ != StopReason::kRunning; }
  StopReason stop_reason() const { return stop_; }
  /// Pending batch, or nullptr once finished.
  const QueryBatch* pending() const { return pending_ ? &*pending_ : nullptr; }
  /// Labels for the pending batch, parallel to pending()->items.
  const IterationRecord& submit(std::span<const Label> labels);

  int t() const { return t_; }
  const QueryFractions& fractions() const { return fractions_; }
  const std::vector<IterationRecord>& history() const { return history_; }
  const LearnerSettings& settings() const { return settings_; }
  const FractionSchedule& schedule() const { return schedule_; }
  const IndexList& labeled() const { return labeled_; }
  const IndexList& unlabeled() const { return unlabeled_; }
  const IndexList& evaluation() const { return evaluation_; }
  const TrainedClassifier& classifier() const { return classifier_; }
  std::size_t queried() const { return queried_; }

 private:
  bool dynamic() const { return settings_.method == Method::kJasMain; }
  TrainingPool pool() const;
  void train_and_record(std::optional<IterationDeltas> deltas, const QueryBatch* batch);
  void prepare_batch();

  const Dataset& data_;
  LearnerSettings settings_;
  SeedPath seeds_;
  FractionSchedule schedule_;
  IndexList labeled_;
  std::vector<Label> labeled_truth_;
  IndexList unlabeled_;
  IndexList evaluation_;
  QueryFractions fractions_;
  TrainedClassifier classifier_;
  bool degenerate_ = false;
  std::optional<QueryBatch> pending_;
  std::vector<IterationRecord> history_;
  int t_ = 0;
  std::size_t queried_ = 0;
  StopReason stop_ = StopReason::kRunning;
};

/// Ground-truth lookup standing in for the human expert. Every index may be
/// charged once; repeats are served but recorded in the audit list.
class SimulatedOracle {
 public:
  explicit SimulatedOracle(const Dataset& data);

  /// Throws std::out_of_range for an unknown index.
  std::vector<Label> label(std::span<const std::size_t> indices);

  std::size_t charged() const { return charged_; }
  const IndexList& repeats() const { return repeats_; }

 private:
  const Dataset& data_;
  std::vector<bool> seen_;
  std::size_t charged_ = 0;
  IndexList repeats_;
};

struct SimulationResult {
  std::vector<IterationRecord> history;
  StopReason stop = StopReason::kCompleted;
  std::size_t charged = 0;
  std::size_t repeats = 0;
};

/// Drive a learner to completion against the simulated oracle. `on_row` is
/// invoked after every completed row, including t = 0.
template <typename OnRow>
SimulationResult simulate(const Dataset& data, const PoolPartition& partition, const LearnerSettings& settings,
                          SeedPath seeds, OnRow&& on_row) {
  SimulatedOracle oracle(data);
  std::vector<Label> initial;
  initial.reserve(partition.labeled.size());
  for (std::size_t i : partition.labeled) initial.push_back(data.labels[i]);
  Learner learner(data, partition, initial, settings, seeds);
  on_row(learner.history().back());
  while (!learner.finished()) {
    const auto labels = oracle.label(learner.pending()->indices());
    on_row(learner.submit(labels));
  }
  return {learner.history(), learner.stop_reason(), oracle.charged(), oracle.repeats().size()};
}

inline SimulationResult simulate(const Dataset& data, const PoolPartition& partition,
                                 const LearnerSettings& settings, SeedPath seeds) {
  return simulate(data, partition, settings, seeds, [](const IterationRecord&) {});
}

/// Seed path of one (sim, method) run; shared by the harness and the service
/// so both reproduce the same draws.
SeedPath run_seeds(std::uint64_t master, int sim, Method method);
/// Seed of the partition of one simulation.
std::uint64_t partition_seed(std::uint64_t master, int sim);

}  // namespace jasmine
