#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasmine/config.hpp"
#include "jasmine/experiment.hpp"
#include "jasmine/learner.hpp"

namespace jasmine {

/// Failure of a service call. `status` follows HTTP conventions and `code` is
/// a stable machine-readable identifier; `field` names the offending input
/// where one applies.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message, std::string field = {})
      : std::runtime_error(message), status_(status), code_(std::move(code)), field_(std::move(field)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const std::string& field() const { return field_; }

 private:
  int status_;
  std::string code_;
  std::string field_;
};

enum class SessionStatus { kAwaitingLabels, kTraining, kFinished };
std::string to_string(SessionStatus status);

struct SessionRequest {
  ExperimentConfig config;
  Method method = Method::kJasMain;
  int sim = 0;  ///< which harness simulation's partition and seeds to use
};

struct FeatureCell {
  std::string name;
  double value = 0.0;
  double percentile = 0.0;  ///< share of U(0) at or below the value, in [0, 100]
};

struct BatchItemView {
  std::string id;
  double prob = 0.0;
  Label predicted = 0;
  bool anomalous = false;
  bool uncertain = false;
  bool random = false;
  std::vector<FeatureCell> features;
};

struct BatchView {
  std::string session;
  int iteration = 0;  ///< the batch produces L(iteration)
  int q = 0;
  int q_a = 0;
  int q_z = 0;
  int q_r = 0;
  QueryFractions fractions;
  std::vector<BatchItemView> items;
};

struct SessionView {
  std::string id;
  SessionStatus status = SessionStatus::kAwaitingLabels;
  std::string method;
  std::string dataset;
  int t = 0;
  int iterations = 0;
  int q = 0;
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  std::size_t evaluation = 0;
  std::string stop_reason;
  QueryFractions fractions;
};

struct MetricsView {
  std::string session;
  IterationRecord initial;
  std::vector<IterationRecord> iterations;  ///< one per completed batch
};

/// Sessions running the active-learning loop with labels supplied by a
/// caller. Requests on one session are serialized; reads see the last
/// published snapshot and never block on training.
class SessionService {
 public:
  SessionService() = default;

  std::string create(const SessionRequest& request);
  SessionView get(const std::string& id) const;
  BatchView batch(const std::string& id) const;
  /// Labels keyed by item id; must cover exactly the pending batch. Returns
  /// the record of the completed iteration.
  IterationRecord post_labels(const std::string& id, const std::map<std::string, Label>& labels);
  MetricsView metrics(const std::string& id) const;
  std::size_t size() const;

  /// Dataset row behind an item id of the pending batch (in-process only; the
  /// HTTP layer never exposes it).
  std::size_t row_of(const std::string& id, const std::string& item) const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const LoadedData> load(const DatasetConfig& config);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::weak_ptr<const LoadedData>> datasets_;
  std::uint64_t counter_ = 0;
};

}  // namespace jasmine
