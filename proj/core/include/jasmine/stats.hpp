#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasmine/dataset.hpp"

namespace jasmine {

/// 2TP / (2TP + FP + FN); 0 when the denominator vanishes.
double f1_score(std::span<const Label> predicted, std::span<const Label> truth);

/// F1 of the dummy that flags everything malicious: 2p / (1 + p).
double coin1_f1(std::span<const Label> truth);

struct CurvePoint {
  int t = 0;
  std::size_t labeled = 0;
  double metric = 0.0;
};

struct LearningCurve {
  std::string method;
  int sim = 0;
  std::vector<CurvePoint> points;  ///< t strictly increasing from 0
};

/// Trapezoidal area under (t, metric) for t in [0, t_ref].
double curve_area(const LearningCurve& curve, int t_ref);
double trapezoid_area(std::span<const double> values);

class UndefinedTestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WilcoxonResult {
  double p_value = 1.0;
  double w_plus = 0.0;   ///< sum of ranks of positive differences
  std::size_t n = 0;     ///< nonzero differences used
  bool exact = true;
};

/// Paired one-sided signed-rank test of median(a) > median(b). Zero
/// differences are dropped, tied magnitudes share average ranks. Exact null
/// distribution for n <= 25, normal approximation with tie and continuity
/// corrections above. Throws UndefinedTestError for fewer than 5 nonzero
/// differences.
WilcoxonResult wilcoxon_one_sided(std::span<const double> a, std::span<const double> b);

/// Report grid: the default t_ref rows truncated to T.
std::vector<int> default_tref_grid(int max_t);

}  // namespace jasmine
