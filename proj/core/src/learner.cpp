#include "jasmine/learner.hpp"

#include <algorithm>
#include <string>

#include "jasmine/stats.hpp"

namespace jasmine {

namespace {

QueryFractions method_fractions(Method method, const JasmineParams& params, const FractionSchedule& schedule) {
  switch (method) {
    case Method::kJasMain: return initial_fractions(params, schedule);
    case Method::kJasBasic:
    case Method::kAlaMain: return static_fractions(StaticQuery::kBasic5050);
    case Method::kJasAnom: return static_fractions(StaticQuery::kAnomOnly);
    case Method::kJasUncert: return static_fractions(StaticQuery::kUncertOnly);
    case Method::kJasRand: return static_fractions(StaticQuery::kRandOnly);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace

Learner::Learner(const Dataset& data, const PoolPartition& partition, std::span<const Label> initial_labels,
                 LearnerSettings settings, SeedPath seeds)
    : data_(data),
      settings_(std::move(settings)),
      seeds_(seeds),
      schedule_(settings_.q, partition.labeled.size(), settings_.jasmine.tau),
      labeled_(partition.labeled),
      labeled_truth_(initial_labels.begin(), initial_labels.end()),
      unlabeled_(partition.unlabeled),
      evaluation_(partition.evaluation) {
  if (settings_.q < 2) throw std::invalid_argument("learner: Q must be >= 2");
  if (settings_.iterations < 0) throw std::invalid_argument("learner: negative iteration count");
  if (settings_.folds < 2) throw std::invalid_argument("learner: k must be >= 2");
  if (labeled_truth_.size() != labeled_.size()) {
    throw std::invalid_argument("learner: initial labels do not match L(0)");
  }
  for (Label y : labeled_truth_) {
    if (y > 1) throw std::invalid_argument("learner: labels must be 0 or 1");
  }
  settings_.jasmine.validate();
  settings_.gbm.validate();
  fractions_ = method_fractions(settings_.method, settings_.jasmine, schedule_);
  train_and_record(std::nullopt, nullptr);
  if (t_ >= settings_.iterations) {
    stop_ = StopReason::kCompleted;
  } else {
    prepare_batch();
  }
}

TrainingPool Learner::pool() const { return TrainingPool{&data_.features, labeled_, labeled_truth_}; }

void Learner::train_and_record(std::optional<IterationDeltas> deltas, const QueryBatch* batch) {
  const auto training = pool();
  const std::uint64_t seed = seeds_.with(static_cast<std::uint64_t>(t_)).with("classifier").seed();
  degenerate_ = !training.has_both_classes() || training.size() < static_cast<std::size_t>(settings_.folds);
  if (degenerate_) {
    const double prior =
        training.size() ? static_cast<double>(training.positives()) / static_cast<double>(training.size()) : 0.5;
    classifier_ = TrainedClassifier::constant(prior);
  } else if (settings_.method == Method::kAlaMain) {
    classifier_ = train_logreg(training, settings_.logreg, settings_.folds, seed);
  } else {
    classifier_ = train_gbm(training, settings_.gbm, settings_.folds, seed);
  }

  IterationRecord row;
  row.t = t_;
  row.labeled = labeled_.size();
  row.labeled_positive = training.positives();
  if (!evaluation_.empty()) {
    const auto pred = classifier_.predict(data_.features, evaluation_);
    std::vector<Label> truth;
    truth.reserve(evaluation_.size());
    for (std::size_t i : evaluation_) truth.push_back(data_.labels[i]);
    row.f1 = f1_score(pred.cls, truth);
  }
  row.fractions = fractions_;
  row.deltas = deltas;
  if (batch) {
    row.q_a = batch->q_a;
    row.q_z = batch->q_z;
    row.q_r = batch->q_r;
  }
  row.degenerate = degenerate_;
  row.kind = classifier_.kind();
  row.theta = classifier_.theta();
  history_.push_back(row);
}

void Learner::prepare_batch() {
  const int q = settings_.q;
  if (unlabeled_.size() < static_cast<std::size_t>(q)) {
    stop_ = StopReason::kPoolExhausted;
    return;
  }
  const SeedPath step = seeds_.with(static_cast<std::uint64_t>(t_));
  Engine rng = step.with("query").engine();
  const auto pred = classifier_.predict(data_.features, unlabeled_);
  if (degenerate_ || settings_.method == Method::kJasRand) {
    pending_ = random_batch(unlabeled_, pred.prob, pred.cls, q, rng);
    return;
  }

  std::vector<double> certainty(unlabeled_.size());
  for (std::size_t i = 0; i < unlabeled_.size(); ++i) certainty[i] = certainty_score(pred.prob[i]);

  const auto pools = split_by_class(labeled_, labeled_truth_, unlabeled_, pred.cls);
  std::vector<double> anomaly(unlabeled_.size());
  if (settings_.method == Method::kAlaMain) {
    auto fit = [&](const IndexList& rows) {
      return rows.size() < 2 ? GaussianAnomalyModel::constant() : GaussianAnomalyModel::train(data_.features, rows);
    };
    const auto benign = fit(pools.benign);
    const auto malicious = fit(pools.malicious);
    for (std::size_t i = 0; i < unlabeled_.size(); ++i) {
      const auto row = data_.features.row(unlabeled_[i]);
      anomaly[i] = pred.cls[i] ? malicious.score(row) : benign.score(row);
    }
  } else {
    const auto forests =
        train_class_forests(data_.features, pools, settings_.iforest, step.with("anomaly").seed());
    for (std::size_t i = 0; i < unlabeled_.size(); ++i) {
      anomaly[i] = forests.anomaly_score(data_.features.row(unlabeled_[i]), pred.cls[i]);
    }
  }

  const ScoredPool scored{unlabeled_, pred.prob, pred.cls, anomaly, certainty};
  pending_ = build_query_batch(scored, allocate_counts(fractions_, q), rng);
}

const IterationRecord& Learner::submit(std::span<const Label> labels) {
  if (!pending_) throw std::logic_error("learner: no pending batch");
  const QueryBatch batch = *pending_;
  if (labels.size() != batch.size()) {
    throw LabelMismatchError("expected " + std::to_string(batch.size()) + " labels, got " +
                             std::to_string(labels.size()));
  }
  for (Label y : labels) {
    if (y > 1) throw LabelMismatchError("labels must be 0 or 1");
  }

  std::optional<IterationDeltas> deltas;
  QueryFractions next = fractions_;
  next.t = fractions_.t + 1;
  if (dynamic()) {
    std::vector<QueriedOutcome> anomalous;
    std::vector<QueriedOutcome> uncertain;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& item = batch.items[i];
      const QueriedOutcome outcome{item.prob, item.predicted, labels[i]};
      if (item.anomalous) anomalous.push_back(outcome);
      if (item.uncertain) uncertain.push_back(outcome);
    }
    double delta_gamma = 0.0;
    if (!degenerate_ && !anomalous.empty() && !uncertain.empty()) {
      IterationDeltas d;
      d.delta_a = info_metric(anomalous, settings_.jasmine.beta);
      d.delta_z = info_metric(uncertain, settings_.jasmine.beta);
      d.delta = d.delta_a - d.delta_z;
      d.delta_gamma = update_factor(d.delta_a, d.delta_z, settings_.jasmine.gamma);
      delta_gamma = d.delta_gamma;
      deltas = d;
    }
    next = update_fractions(fractions_, delta_gamma, schedule_);
  }

  std::vector<bool> taken(data_.size(), false);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::size_t idx = batch.items[i].index;
    taken[idx] = true;
    labeled_.push_back(idx);
    labeled_truth_.push_back(labels[i]);
  }
  std::erase_if(unlabeled_, [&](std::size_t idx) { return taken[idx]; });
  queried_ += batch.size();

  pending_.reset();
  ++t_;
  fractions_ = next;
  train_and_record(deltas, &batch);
  if (t_ >= settings_.iterations) {
    stop_ = StopReason::kCompleted;
  } else {
    prepare_batch();
  }
  return history_.back();
}

SimulatedOracle::SimulatedOracle(const Dataset& data) : data_(data), seen_(data.size(), false) {}

std::vector<Label> SimulatedOracle::label(std::span<const std::size_t> indices) {
  std::vector<Label> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= data_.size()) throw std::out_of_range("oracle: unknown index " + std::to_string(i));
    if (seen_[i]) {
      repeats_.push_back(i);
    } else {
      seen_[i] = true;
      ++charged_;
    }
    out.push_back(data_.labels[i]);
  }
  return out;
}

SeedPath run_seeds(std::uint64_t master, int sim, Method method) {
  return SeedPath(master).with("sim").with(static_cast<std::uint64_t>(sim)).with(method_name(method));
}

std::uint64_t partition_seed(std::uint64_t master, int sim) {
  return SeedPath(master).with("sim").with(static_cast<std::uint64_t>(sim)).with("partition").seed();
}

}  // namespace jasmine
