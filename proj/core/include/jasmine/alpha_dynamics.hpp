#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "jasmine/dataset.hpp"
#include "jasmine/query.hpp"

namespace jasmine {

/// Tunable Jasmine parameters: starting anomaly share, false-negative weight,
/// update magnitude and random-share decay speed.
struct JasmineParams {
  double alpha_a0 = 0.5;
  double beta = 1.0;
  double gamma = 1.0;
  double tau = 1.0 / 400.0;

  void validate() const;
};

/// Bounds and the random-share schedule for a run with batch size Q and
/// initial labeled size L(0).
///
///   alpha_min          = 1 / Q                      (floor for a and z)
///   alpha_r_max        = 1 - 2 / Q
///   alpha_r(t)         = alpha_r_max * 2^(-tau * (L0 + Q t))
///   alpha_az_max(t)    = 1 - alpha_r(t) - alpha_min
class FractionSchedule {
 public:
  FractionSchedule(int q, std::size_t initial_labeled, double tau);

  int q() const { return q_; }
  double alpha_min() const { return 1.0 / q_; }
  double alpha_r_max() const { return 1.0 - 2.0 / q_; }
  double labeled_at(int t) const;
  double alpha_r(int t) const;
  double alpha_az_max(int t) const;

  /// Linear map of [alpha_min, alpha_az_max(t)] onto [alpha_min, alpha_az_max(t+1)].
  double rescale(int t, double alpha) const;

 private:
  int q_;
  std::size_t l0_;
  double tau_;
};

/// Fractions at t = 0. The anomaly share is taken relative to the non-random
/// mass and clipped into the bounds.
QueryFractions initial_fractions(const JasmineParams& params, const FractionSchedule& schedule);

/// True if the fractions sum to one and respect the bounds at their t.
bool fractions_valid(const QueryFractions& f, const FractionSchedule& schedule, double tol = 1e-9);

struct QueriedOutcome {
  double prob = 0.0;
  Label predicted = 0;
  Label truth = 0;
};

/// Weighted FP/FN mass of a query subset, in [0, 1]. False negatives weigh
/// beta. Throws std::invalid_argument for an empty subset.
double info_metric(std::span<const QueriedOutcome> subset, double beta);

/// sgn(d_a - d_z) * |d_a - d_z|^(1/gamma).
double update_factor(double delta_a, double delta_z, double gamma);

/// Move alpha_a toward its upper bound when the factor is positive (toward
/// the floor when negative), alpha_z the opposite way, rescale both to t+1
/// bounds and set alpha_r from the schedule.
QueryFractions update_fractions(const QueryFractions& current, double delta_gamma,
                                const FractionSchedule& schedule);

struct UpdateTrace {
  double delta_a = 0.0;
  double delta_z = 0.0;
  double delta = 0.0;
  double delta_gamma = 0.0;
  QueryFractions next;
};

}  // namespace jasmine
