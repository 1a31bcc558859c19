#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "jasmine/classifier.hpp"
#include "jasmine/random.hpp"
#include "jasmine/stats.hpp"
#include "text_util.hpp"

namespace jasmine {

std::size_t TrainingPool::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label{1}));
}

bool TrainingPool::has_both_classes() const {
  const std::size_t pos = positives();
  return pos > 0 && pos < labels.size();
}

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kGbm: return "gbm";
    case ClassifierKind::kLogReg: return "logreg";
    case ClassifierKind::kConstant: return "constant";
  }
  return "unknown";
}

double transform_prob(double y, double theta) {
  const double v = (1.0 - theta) * y / ((1.0 - 2.0 * theta) * y + theta);
  return std::clamp(v, 0.0, 1.0);
}

TrainedClassifier TrainedClassifier::constant(double prior) {
  TrainedClassifier c;
  c.model_ = Constant{std::clamp(prior, 0.0, 1.0)};
  c.theta_ = 0.5;
  return c;
}

TrainedClassifier TrainedClassifier::gbm(GbmModel model, double theta) {
  TrainedClassifier c;
  c.model_ = std::move(model);
  c.theta_ = theta;
  return c;
}

TrainedClassifier TrainedClassifier::logreg(LogRegModel model, double theta) {
  TrainedClassifier c;
  c.model_ = std::move(model);
  c.theta_ = theta;
  return c;
}

ClassifierKind TrainedClassifier::kind() const {
  if (std::holds_alternative<GbmModel>(model_)) return ClassifierKind::kGbm;
  if (std::holds_alternative<LogRegModel>(model_)) return ClassifierKind::kLogReg;
  return ClassifierKind::kConstant;
}

double TrainedClassifier::predict_raw(std::span<const double> row) const {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Constant>) {
          return m.prior;
        } else {
          return m.predict_raw(row);
        }
      },
      model_);
}

Predictions TrainedClassifier::predict(const FeatureMatrix& features,
                                       std::span<const std::size_t> rows) const {
  if (const auto* g = gbm_model(); g && g->width != features.cols()) {
    throw std::invalid_argument("predict: row width does not match training width");
  }
  if (const auto* lr = std::get_if<LogRegModel>(&model_); lr && lr->weights.size() != features.cols()) {
    throw std::invalid_argument("predict: row width does not match training width");
  }
  Predictions out;
  out.raw.reserve(rows.size());
  out.prob.reserve(rows.size());
  out.cls.reserve(rows.size());
  for (std::size_t r : rows) {
    const double raw = predict_raw(features.row(r));
    const double p = transform_prob(raw, theta_);
    out.raw.push_back(raw);
    out.prob.push_back(p);
    out.cls.push_back(p >= 0.5 ? 1 : 0);
  }
  return out;
}

double select_threshold(std::span<const double> probs, std::span<const Label> labels) {
  const std::size_t n = probs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  std::size_t total_pos = 0;
  for (Label y : labels) total_pos += y;

  // Sweep cuts from low to high: everything at or above the cut is predicted 1.
  double best_theta = 0.5;
  double best_f1 = -1.0;
  std::size_t below_pos = 0;
  std::size_t below = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && probs[order[j]] == probs[order[i]]) {
      below_pos += labels[order[j]];
      ++below;
      ++j;
    }
    if (j == n) break;
    const double cut = 0.5 * (probs[order[i]] + probs[order[j]]);
    const std::size_t tp = total_pos - below_pos;
    const std::size_t predicted = n - below;
    const std::size_t fp = predicted - tp;
    const std::size_t fn = below_pos;
    const double denom = static_cast<double>(2 * tp + fp + fn);
    const double f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    if (f1 > best_f1) {
      best_f1 = f1;
      best_theta = cut;
    }
    i = j;
  }
  return std::clamp(best_theta, 1e-9, 1.0 - 1e-9);
}

std::vector<int> assign_folds(std::span<const Label> labels, int k, std::uint64_t seed) {
  std::vector<std::size_t> neg;
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  Engine rng = SeedPath(seed).with("folds").engine();
  shuffle(neg, rng);
  shuffle(pos, rng);
  std::vector<int> fold(labels.size());
  std::size_t counter = 0;
  for (auto* group : {&neg, &pos}) {
    for (std::size_t i : *group) fold[i] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
  }
  return fold;
}

namespace {

template <typename Fit>
CrossValidation cross_validate(const TrainingPool& pool, int k, std::uint64_t seed, Fit&& fit) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  if (static_cast<std::size_t>(k) > pool.size()) {
    throw std::invalid_argument("cross-validation: k exceeds pool size");
  }
  const auto folds = assign_folds(pool.labels, k, seed);
  CrossValidation cv;
  cv.oof.assign(pool.size(), 0.0);
  for (int f = 0; f < k; ++f) {
    TrainingPool train{pool.features, {}, {}};
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (folds[i] == f) {
        held.push_back(i);
      } else {
        train.rows.push_back(pool.rows[i]);
        train.labels.push_back(pool.labels[i]);
      }
    }
    const std::uint64_t fold_seed = SeedPath(seed).with("fold").with(static_cast<std::uint64_t>(f)).seed();
    const double prior = train.size() ? static_cast<double>(train.positives()) / static_cast<double>(train.size()) : 0.5;
    for (std::size_t i : held) {
      cv.oof[i] = train.has_both_classes() ? 0.0 : prior;
    }
    if (!train.has_both_classes()) continue;
    const auto model = fit(train, fold_seed);
    for (std::size_t i : held) cv.oof[i] = model.predict_raw(pool.features->row(pool.rows[i]));
  }
  cv.theta = select_threshold(cv.oof, pool.labels);
  std::vector<Label> cls(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) cls[i] = cv.oof[i] >= cv.theta ? 1 : 0;
  cv.f1 = f1_score(cls, pool.labels);
  return cv;
}

void require_trainable(const TrainingPool& pool, int k) {
  if (!pool.has_both_classes()) throw DegeneratePoolError("training pool holds a single class");
  if (k < 2 || static_cast<std::size_t>(k) > pool.size()) {
    throw std::invalid_argument("k must be in [2, pool size]");
  }
}

}  // namespace

CrossValidation cross_validate_gbm(const TrainingPool& pool, const GbmHyperParams& params, int k,
                                   std::uint64_t seed) {
  std::uint64_t work = 0;
  auto cv = cross_validate(pool, k, seed, [&](const TrainingPool& train, std::uint64_t s) {
    return fit_gbm(train, params, s, nullptr, &work);
  });
  cv.work = work;
  return cv;
}

TrainedClassifier train_gbm(const TrainingPool& pool, const GbmHyperParams& params, int k,
                            std::uint64_t seed) {
  require_trainable(pool, k);
  params.validate();
  const auto cv = cross_validate_gbm(pool, params, k, seed);
  auto model = fit_gbm(pool, params, SeedPath(seed).with("full").seed());
  return TrainedClassifier::gbm(std::move(model), cv.theta);
}

TrainedClassifier train_logreg(const TrainingPool& pool, const LogRegParams& params, int k,
                               std::uint64_t seed) {
  require_trainable(pool, k);
  double theta = 0.5;
  if (params.calibrate) {
    theta = cross_validate(pool, k, seed, [&](const TrainingPool& train, std::uint64_t) {
              return fit_logreg(train, params);
            }).theta;
  }
  return TrainedClassifier::logreg(fit_logreg(pool, params), theta);
}

// ---------------------------------------------------------------------------
// Text dump:
//   jasmine-model 1
//   kind gbm|logreg|constant
//   theta <x>
//   gbm:      init <f0> / width <k> / trees <n> / tree <rate> <nodes> then one
//             line per node: "split <feature> <threshold> <left> <right>" or
//             "leaf <value>"
//   logreg:   width <k> / bias <b> / then "coef <mean> <scale> <weight>" x k
//   constant: prior <p>

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string TrainedClassifier::dump() const {
  std::ostringstream out;
  out << "jasmine-model 1\n";
  out << "kind " << to_string(kind()) << '\n';
  out << "theta " << fmt(theta_) << '\n';
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Constant>) {
          out << "prior " << fmt(m.prior) << '\n';
        } else if constexpr (std::is_same_v<M, GbmModel>) {
          out << "init " << fmt(m.init_score) << "\nwidth " << m.width << "\ntrees " << m.trees.size() << '\n';
          for (const auto& t : m.trees) {
            out << "tree " << fmt(t.rate) << ' ' << t.nodes.size() << '\n';
            for (const auto& node : t.nodes) {
              if (node.feature < 0) {
                out << "leaf " << fmt(node.value) << '\n';
              } else {
                out << "split " << node.feature << ' ' << fmt(node.threshold) << ' ' << node.left << ' '
                    << node.right << '\n';
              }
            }
          }
        } else {
          out << "width " << m.weights.size() << "\nbias " << fmt(m.bias) << '\n';
          for (std::size_t j = 0; j < m.weights.size(); ++j) {
            out << "coef " << fmt(m.mean[j]) << ' ' << fmt(m.scale[j]) << ' ' << fmt(m.weights[j]) << '\n';
          }
        }
      },
      model_);
  return out.str();
}

TrainedClassifier TrainedClassifier::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) throw std::runtime_error("model dump: expected '" + word + "'");
  };
  auto read_double = [&] {
    std::string tok;
    in >> tok;
    auto v = detail::parse_number(tok);
    if (!v) throw std::runtime_error("model dump: bad number '" + tok + "'");
    return *v;
  };
  int version = 0;
  expect("jasmine-model");
  in >> version;
  if (version != 1) throw std::runtime_error("model dump: unsupported version");
  std::string kind;
  expect("kind");
  in >> kind;
  expect("theta");
  const double theta = read_double();
  if (kind == "constant") {
    expect("prior");
    auto c = constant(read_double());
    c.theta_ = theta;
    return c;
  }
  if (kind == "gbm") {
    GbmModel m;
    expect("init");
    m.init_score = read_double();
    expect("width");
    in >> m.width;
    std::size_t ntrees = 0;
    expect("trees");
    in >> ntrees;
    for (std::size_t t = 0; t < ntrees; ++t) {
      RegressionTree tree;
      std::size_t nodes = 0;
      expect("tree");
      tree.rate = read_double();
      in >> nodes;
      for (std::size_t i = 0; i < nodes; ++i) {
        std::string what;
        in >> what;
        RegressionTree::Node node;
        if (what == "leaf") {
          node.value = read_double();
        } else if (what == "split") {
          in >> node.feature;
          node.threshold = read_double();
          in >> node.left >> node.right;
        } else {
          throw std::runtime_error("model dump: bad node '" + what + "'");
        }
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    return gbm(std::move(m), theta);
  }
  if (kind == "logreg") {
    LogRegModel m;
    std::size_t width = 0;
    expect("width");
    in >> width;
    expect("bias");
    m.bias = read_double();
    for (std::size_t j = 0; j < width; ++j) {
      expect("coef");
      m.mean.push_back(read_double());
      m.scale.push_back(read_double());
      m.weights.push_back(read_double());
    }
    return logreg(std::move(m), theta);
  }
  throw std::runtime_error("model dump: unknown kind '" + kind + "'");
}

}  // namespace jasmine
