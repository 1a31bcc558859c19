#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "jasmine/dataset.hpp"

namespace jasmine {

/// Thrown when a training pool holds a single class.
class DegeneratePoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Labeled rows of a feature matrix. `labels[i]` belongs to `rows[i]`.
struct TrainingPool {
  const FeatureMatrix* features = nullptr;
  IndexList rows;
  std::vector<Label> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t positives() const;
  bool has_both_classes() const;
};

struct GbmHyperParams {
  int ntrees = 50;
  int max_depth = 5;
  double learn_rate = 0.1;
  double learn_rate_annealing = 1.0;
  double sample_rate = 1.0;
  double col_sample_rate = 1.0;           ///< per split, within the tree's columns
  double col_sample_rate_per_tree = 1.0;
  double col_sample_rate_change_per_level = 1.0;  ///< multiplies the split rate per depth level
  int min_rows = 10;
  int nbins = 20;
  // histogram_type, nbins_cats, distribution: accepted, recorded, not used
  // (quantile histograms, no categorical columns, Bernoulli deviance always).
  std::map<std::string, std::string> extra;

  void validate() const;
  std::string describe() const;
};

struct RegressionTree {
  struct Node {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;  ///< rows with x < threshold go left
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;
  double rate = 1.0;

  double evaluate(std::span<const double> row) const;
};

struct GbmModel {
  double init_score = 0.0;
  std::vector<RegressionTree> trees;
  std::size_t width = 0;

  double raw_margin(std::span<const double> row) const;
  double predict_raw(std::span<const double> row) const;
};

/// Fit boosted trees on the whole pool. `loss_trace`, when given, receives the
/// training log-loss after the initial fit and after every tree. `work`, when
/// given, is incremented by the number of histogram and tree-walk updates, a
/// machine-independent cost measure.
GbmModel fit_gbm(const TrainingPool& pool, const GbmHyperParams& params, std::uint64_t seed,
                 std::vector<double>* loss_trace = nullptr, std::uint64_t* work = nullptr);

struct LogRegParams {
  double l2 = 1e-3;
  int iters = 300;
  double step = 0.5;
  bool calibrate = false;  ///< choose theta by CV like the GBM when set
};

struct LogRegModel {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0.0;

  double predict_raw(std::span<const double> row) const;
};

LogRegModel fit_logreg(const TrainingPool& pool, const LogRegParams& params);

enum class ClassifierKind { kGbm, kLogReg, kConstant };
std::string to_string(ClassifierKind kind);

struct Predictions {
  std::vector<double> raw;    ///< model probability before re-centering
  std::vector<double> prob;   ///< after phi_theta
  std::vector<Label> cls;     ///< 1 iff prob >= 0.5
};

/// Re-centering map sending theta to 0.5 while fixing 0 and 1.
double transform_prob(double y, double theta);

class TrainedClassifier {
 public:
  static TrainedClassifier constant(double prior);
  static TrainedClassifier gbm(GbmModel model, double theta);
  static TrainedClassifier logreg(LogRegModel model, double theta);

  ClassifierKind kind() const;
  double theta() const { return theta_; }

  double predict_raw(std::span<const double> row) const;
  Predictions predict(const FeatureMatrix& features, std::span<const std::size_t> rows) const;

  const GbmModel* gbm_model() const { return std::get_if<GbmModel>(&model_); }

  /// Line-oriented self-describing dump ("jasmine-model 1" header).
  std::string dump() const;
  static TrainedClassifier parse(std::string_view text);

 private:
  struct Constant {
    double prior;
  };
  std::variant<Constant, GbmModel, LogRegModel> model_{Constant{0.5}};
  double theta_ = 0.5;
};

/// Theta over pooled out-of-fold probabilities: the midpoint between
/// consecutive distinct values that maximizes F1 (class 1 iff p >= theta);
/// ties go to the smaller theta. Returns 0.5 when all values coincide.
double select_threshold(std::span<const double> probs, std::span<const Label> labels);

/// Stratified k-fold assignment, deterministic in `seed`.
std::vector<int> assign_folds(std::span<const Label> labels, int k, std::uint64_t seed);

struct CrossValidation {
  std::vector<double> oof;  ///< out-of-fold probability per pool row
  double theta = 0.5;
  double f1 = 0.0;          ///< pooled out-of-fold F1 at theta
  std::uint64_t work = 0;   ///< summed fit_gbm work over the folds
};

CrossValidation cross_validate_gbm(const TrainingPool& pool, const GbmHyperParams& params, int k,
                                   std::uint64_t seed);

/// Full-pool fit plus CV-calibrated theta. Throws DegeneratePoolError for a
/// single-class pool and std::invalid_argument when k exceeds the pool size.
TrainedClassifier train_gbm(const TrainingPool& pool, const GbmHyperParams& params, int k,
                            std::uint64_t seed);

TrainedClassifier train_logreg(const TrainingPool& pool, const LogRegParams& params, int k,
                               std::uint64_t seed);

}  // namespace jasmine
