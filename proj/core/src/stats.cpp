#include "jasmine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace jasmine {

double f1_score(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("f1: length mismatch");
  if (truth.empty()) throw std::invalid_argument("f1: empty input");
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] && truth[i]) ++tp;
    else if (predicted[i]) ++fp;
    else if (truth[i]) ++fn;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double coin1_f1(std::span<const Label> truth) {
  std::vector<Label> all(truth.size(), 1);
  return f1_score(all, truth);
}

double trapezoid_area(std::span<const double> values) {
  double area = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) area += 0.5 * (values[i - 1] + values[i]);
  return area;
}

double curve_area(const LearningCurve& curve, int t_ref) {
  if (curve.points.empty() || t_ref < curve.points.front().t || t_ref > curve.points.back().t) {
    throw std::out_of_range("curve_area: t_ref outside the curve");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size() && curve.points[i].t <= t_ref; ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += 0.5 * (a.metric + b.metric) * static_cast<double>(b.t - a.t);
  }
  return area;
}

namespace {

constexpr std::size_t kExactLimit = 25;

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: unpaired samples");
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  const std::size_t n = diff.size();
  if (n < 5) throw UndefinedTestError("wilcoxon: fewer than 5 nonzero differences");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(diff[x]) < std::abs(diff[y]); });
  // Doubled ranks keep average ranks integral.
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(diff[order[j]]) == std::abs(diff[order[i]])) ++j;
    const std::uint64_t doubled = static_cast<std::uint64_t>(i + 1 + j);  // 2 * mean of i+1..j
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = doubled;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::uint64_t w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diff[i] > 0) w2 += rank2[i];
  }

  WilcoxonResult res;
  res.n = n;
  res.w_plus = static_cast<double>(w2) / 2.0;
  if (n <= kExactLimit) {
    // count[s] = number of sign assignments with doubled positive rank sum s.
    std::uint64_t total2 = 0;
    for (auto r : rank2) total2 += r;
    std::vector<std::uint64_t> count(total2 + 1, 0);
    count[0] = 1;
    std::uint64_t reach = 0;
    for (auto r : rank2) {
      reach += r;
      for (std::uint64_t s = reach; s >= r; --s) {
        count[s] += count[s - r];
        if (s == r) break;
      }
    }
    std::uint64_t tail = 0;
    for (std::uint64_t s = w2; s <= total2; ++s) tail += count[s];
    res.p_value = static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n));
    res.exact = true;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (res.w_plus - mean - 0.5) / std::sqrt(var);
    res.p_value = normal_upper_tail(z);
    res.exact = false;
  }
  return res;
}

std::vector<int> default_tref_grid(int max_t) {
  static constexpr int kRows[] = {9, 16, 22, 34, 47, 122, 247, 372};
  std::vector<int> out;
  for (int t : kRows) {
    if (t <= max_t) out.push_back(t);
  }
  if (out.empty() || out.back() != max_t) out.push_back(max_t);
  return out;
}

}  // namespace jasmine
