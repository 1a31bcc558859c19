#include "jasmine/alpha_dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace jasmine {

void JasmineParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("jasmine: beta must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("jasmine: gamma must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("jasmine: tau must be positive");
  if (!(alpha_a0 >= 0.0 && alpha_a0 <= 1.0)) throw std::invalid_argument("jasmine: alpha_a0 must be in [0,1]");
}

FractionSchedule::FractionSchedule(int q, std::size_t initial_labeled, double tau)
    : q_(q), l0_(initial_labeled), tau_(tau) {
  if (q < 2) throw std::invalid_argument("fraction schedule: Q must be >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("fraction schedule: tau must be positive");
}

double FractionSchedule::labeled_at(int t) const {
  return static_cast<double>(l0_) + static_cast<double>(q_) * static_cast<double>(t);
}

double FractionSchedule::alpha_r(int t) const { return alpha_r_max() * std::exp2(-tau_ * labeled_at(t)); }

double FractionSchedule::alpha_az_max(int t) const { return 1.0 - alpha_r(t) - alpha_min(); }

double FractionSchedule::rescale(int t, double alpha) const {
  const double lo = alpha_min();
  const double width_now = alpha_az_max(t) - lo;
  const double width_next = alpha_az_max(t + 1) - lo;
  // Only Q = 2 collapses the interval to a point.
  if (width_now <= 0.0) return lo;
  return width_next / width_now * (alpha - lo) + lo;
}

QueryFractions initial_fractions(const JasmineParams& params, const FractionSchedule& schedule) {
  QueryFractions f;
  f.t = 0;
  f.alpha_r = schedule.alpha_r(0);
  const double mass = 1.0 - f.alpha_r;
  const double lo = schedule.alpha_min();
  const double hi = schedule.alpha_az_max(0);
  f.alpha_a = std::clamp(params.alpha_a0 * mass, lo, std::max(lo, hi));
  f.alpha_z = mass - f.alpha_a;
  if (f.alpha_z < lo) {
    f.alpha_z = lo;
    f.alpha_a = mass - lo;
  }
  return f;
}

bool fractions_valid(const QueryFractions& f, const FractionSchedule& schedule, double tol) {
  const double lo = schedule.alpha_min();
  const double hi = schedule.alpha_az_max(f.t);
  auto within = [&](double v) { return v >= lo - tol && v <= hi + tol; };
  return std::abs(f.sum() - 1.0) <= tol && within(f.alpha_a) && within(f.alpha_z) &&
         f.alpha_r >= schedule.alpha_r(f.t) - tol && f.alpha_r < schedule.alpha_r_max() + tol;
}

double info_metric(std::span<const QueriedOutcome> subset, double beta) {
  if (subset.empty()) throw std::invalid_argument("info_metric: empty query subset");
  double numerator = 0.0;
  std::size_t positives = 0;
  for (const auto& q : subset) {
    const double err = std::abs(q.prob - static_cast<double>(q.truth));
    if (q.predicted == 0 && q.truth == 1) numerator += beta * err;
    if (q.predicted == 1 && q.truth == 0) numerator += err;
    positives += q.truth;
  }
  const double denominator =
      static_cast<double>(subset.size()) + (beta - 1.0) * static_cast<double>(positives);
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

double update_factor(double delta_a, double delta_z, double gamma) {
  const double d = delta_a - delta_z;
  if (d == 0.0) return 0.0;
  const double magnitude = gamma == 1.0 ? std::abs(d) : std::pow(std::abs(d), 1.0 / gamma);
  return d > 0.0 ? magnitude : -magnitude;
}

QueryFractions update_fractions(const QueryFractions& current, double delta_gamma,
                                const FractionSchedule& schedule) {
  const int t = current.t;
  const double lo = schedule.alpha_min();
  const double hi = schedule.alpha_az_max(t);
  const double up = std::max(0.0, delta_gamma);
  const double down = std::min(0.0, delta_gamma);

  const double pre_a = current.alpha_a + (hi - current.alpha_a) * up + (current.alpha_a - lo) * down;
  const double pre_z = current.alpha_z + (hi - current.alpha_z) * (-down) + (current.alpha_z - lo) * (-up);

  QueryFractions next;
  next.t = t + 1;
  next.alpha_a = schedule.rescale(t, pre_a);
  next.alpha_z = schedule.rescale(t, pre_z);
  next.alpha_r = schedule.alpha_r(t + 1);
  return next;
}

}  // namespace jasmine
