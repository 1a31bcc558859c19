#include "jasmine/session.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <random>
#include <set>

namespace jasmine {

std::string to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::kAwaitingLabels: return "awaiting_labels";
    case SessionStatus::kTraining: return "training";
    case SessionStatus::kFinished: return "finished";
  }
  return "unknown";
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fresh_secret() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

const char* stop_text(StopReason r) {
  switch (r) {
    case StopReason::kRunning: return "";
    case StopReason::kCompleted: return "completed";
    case StopReason::kPoolExhausted: return "pool_exhausted";
  }
  return "";
}

}  // namespace

struct SessionService::Session {
  std::string id;
  SessionRequest request;
  std::shared_ptr<const LoadedData> data;
  PoolPartition partition;
  PhaseOne phase;
  std::unique_ptr<Learner> learner;
  std::uint64_t secret = 0;
  std::vector<std::vector<double>> sorted_columns;

  std::mutex transition;
  mutable std::shared_mutex snapshot;
  SessionStatus status = SessionStatus::kAwaitingLabels;
  std::optional<BatchView> batch;
  std::map<std::string, std::size_t> token_pos;
  std::set<std::string> old_tokens;
  SessionView view;
  MetricsView metrics;

  double percentile(std::size_t feature, double value) const {
    const auto& col = sorted_columns[feature];
    if (col.empty()) return 0.0;
    const auto below = std::upper_bound(col.begin(), col.end(), value) - col.begin();
    return 100.0 * static_cast<double>(below) / static_cast<double>(col.size());
  }

  // Rebuild the published views from the learner. Caller holds `transition`.
  void publish() {
    const Learner& l = *learner;
    const Dataset& ds = data->data;
    std::optional<BatchView> next_batch;
    std::map<std::string, std::size_t> next_tokens;
    if (const QueryBatch* qb = l.pending()) {
      BatchView b;
      b.session = id;
      b.iteration = l.t() + 1;
      b.q = l.settings().q;
      b.q_a = qb->q_a;
      b.q_z = qb->q_z;
      b.q_r = qb->q_r;
      b.fractions = l.fractions();
      for (std::size_t i = 0; i < qb->items.size(); ++i) {
        const auto& item = qb->items[i];
        BatchItemView v;
        v.id = hex64(SeedPath(secret).with(static_cast<std::uint64_t>(l.t())).with(static_cast<std::uint64_t>(i)).seed());
        v.prob = item.prob;
        v.predicted = item.predicted;
        v.anomalous = item.anomalous;
        v.uncertain = item.uncertain;
        v.random = item.random;
        const auto row = ds.features.row(item.index);
        for (std::size_t j = 0; j < row.size(); ++j) {
          v.features.push_back({j < ds.feature_names.size() ? ds.feature_names[j] : "f" + std::to_string(j), row[j],
                                percentile(j, row[j])});
        }
        next_tokens[v.id] = i;
        b.items.push_back(std::move(v));
      }
      next_batch = std::move(b);
    }

    SessionView v;
    v.id = id;
    v.status = l.finished() ? SessionStatus::kFinished : SessionStatus::kAwaitingLabels;
    v.method = method_name(request.method);
    v.dataset = ds.name;
    v.t = l.t();
    v.iterations = l.settings().iterations;
    v.q = l.settings().q;
    v.labeled = l.labeled().size();
    v.unlabeled = l.unlabeled().size();
    v.evaluation = l.evaluation().size();
    v.stop_reason = stop_text(l.stop_reason());
    v.fractions = l.fractions();

    MetricsView m;
    m.session = id;
    m.initial = l.history().front();
    m.iterations.assign(l.history().begin() + 1, l.history().end());

    std::unique_lock lock(snapshot);
    for (const auto& [token, pos] : token_pos) old_tokens.insert(token);
    batch = std::move(next_batch);
    token_pos = std::move(next_tokens);
    view = std::move(v);
    metrics = std::move(m);
    status = view.status;
  }
};

std::shared_ptr<const LoadedData> SessionService::load(const DatasetConfig& config) {
  ExperimentConfig probe;
  probe.dataset = config;
  const std::string key = probe.serialize();
  {
    std::lock_guard lock(mutex_);
    if (auto it = datasets_.find(key); it != datasets_.end()) {
      if (auto p = it->second.lock()) return p;
    }
  }
  auto loaded = std::make_shared<const LoadedData>(load_dataset(config));
  std::lock_guard lock(mutex_);
  datasets_[key] = loaded;
  return loaded;
}

std::string SessionService::create(const SessionRequest& request) {
  try {
    request.config.validate();
  } catch (const ConfigError& e) {
    throw ServiceError(400, "invalid_config", e.what(), e.field());
  }
  if (request.sim < 0) throw ServiceError(400, "invalid_config", "sim must be >= 0", "sim");

  auto session = std::make_shared<Session>();
  session->request = request;
  try {
    session->data = load(request.config.dataset);
    session->data->data.validate();
  } catch (const ConfigError& e) {
    throw ServiceError(400, "invalid_config", e.what(), e.field());
  } catch (const std::exception& e) {
    throw ServiceError(400, "dataset_error", e.what(), "dataset");
  }
  const Dataset& ds = session->data->data;
  try {
    session->partition = simulation_partition(request.config, *session->data, request.sim);
  } catch (const std::exception& e) {
    throw ServiceError(400, "invalid_config", e.what(), "L0");
  }
  try {
    session->phase = phase_one(request.config, ds, session->partition, request.sim);
  } catch (const std::exception& e) {
    throw ServiceError(422, "tuning_failed", e.what());
  }
  std::vector<Label> initial;
  for (std::size_t i : session->partition.labeled) initial.push_back(ds.labels[i]);
  try {
    session->learner = std::make_unique<Learner>(ds, session->partition, initial,
                                                 learner_settings(request.config, request.method, session->phase),
                                                 run_seeds(request.config.seed, request.sim, request.method));
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, "invalid_config", e.what());
  }

  session->sorted_columns.assign(ds.width(), {});
  for (std::size_t j = 0; j < ds.width(); ++j) {
    auto& col = session->sorted_columns[j];
    col.reserve(session->partition.unlabeled.size());
    for (std::size_t i : session->partition.unlabeled) col.push_back(ds.features.at(i, j));
    std::sort(col.begin(), col.end());
  }

  session->secret = fresh_secret();
  {
    std::lock_guard lock(mutex_);
    session->id = hex64(splitmix64(session->secret ^ ++counter_));
    sessions_[session->id] = session;
  }
  std::lock_guard transition(session->transition);
  session->publish();
  return session->id;
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown_session", "no session '" + id + "'");
  return it->second;
}

std::size_t SessionService::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

SessionView SessionService::get(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->snapshot);
  SessionView v = s->view;
  v.status = s->status;
  return v;
}

BatchView SessionService::batch(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->snapshot);
  if (s->status != SessionStatus::kAwaitingLabels || !s->batch) {
    throw ServiceError(409, "wrong_status", "session is " + to_string(s->status) + ", no batch pending");
  }
  return *s->batch;
}

MetricsView SessionService::metrics(const std::string& id) const {
  auto s = find(id);
  std::shared_lock lock(s->snapshot);
  return s->metrics;
}

std::size_t SessionService::row_of(const std::string& id, const std::string& item) const {
  auto s = find(id);
  std::lock_guard transition(s->transition);
  std::shared_lock lock(s->snapshot);
  auto it = s->token_pos.find(item);
  if (it == s->token_pos.end()) throw ServiceError(422, "unknown_item", "unknown item '" + item + "'", item);
  return s->learner->pending()->items[it->second].index;
}

IterationRecord SessionService::post_labels(const std::string& id, const std::map<std::string, Label>& labels) {
  auto s = find(id);
  std::lock_guard transition(s->transition);
  std::vector<Label> ordered;
  {
    std::shared_lock lock(s->snapshot);
    if (s->status != SessionStatus::kAwaitingLabels || !s->batch) {
      throw ServiceError(409, "wrong_status", "session is " + to_string(s->status) + ", no batch pending");
    }
    ordered.assign(s->batch->items.size(), 0);
    std::vector<bool> covered(ordered.size(), false);
    for (const auto& [token, label] : labels) {
      auto it = s->token_pos.find(token);
      if (it == s->token_pos.end()) {
        if (s->old_tokens.count(token)) {
          throw ServiceError(409, "stale_batch", "item '" + token + "' belongs to an already labeled batch", token);
        }
        throw ServiceError(422, "unknown_item", "unknown item '" + token + "'", token);
      }
      if (label > 1) throw ServiceError(422, "invalid_label", "labels must be 0 or 1", token);
      ordered[it->second] = label;
      covered[it->second] = true;
    }
    const auto missing = std::count(covered.begin(), covered.end(), false);
    if (missing > 0) {
      throw ServiceError(422, "missing_items", std::to_string(missing) + " item(s) of the batch are unlabeled");
    }
  }
  {
    std::unique_lock lock(s->snapshot);
    s->status = SessionStatus::kTraining;
  }
  try {
    s->learner->submit(ordered);
  } catch (const std::exception& e) {
    std::unique_lock lock(s->snapshot);
    s->status = SessionStatus::kFinished;
    throw ServiceError(500, "internal", e.what());
  }
  s->publish();
  return s->learner->history().back();
}

}  // namespace jasmine
