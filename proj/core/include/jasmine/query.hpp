#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jasmine/dataset.hpp"
#include "jasmine/random.hpp"

namespace jasmine {

/// Anomalous / uncertain / random shares of one query batch.
struct QueryFractions {
  double alpha_a = 0.0;
  double alpha_z = 0.0;
  double alpha_r = 0.0;
  int t = 0;

  double sum() const { return alpha_a + alpha_z + alpha_r; }
};

/// Signalled when fewer than Q unlabeled rows remain.
class PoolExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2 |y - 1/2|: 0 is maximally uncertain, 1 fully certain.
double certainty_score(double prob);

struct QueryCounts {
  std::array<int, 2> anomalous{};  ///< per predicted class
  std::array<int, 2> uncertain{};
  int random = 0;

  int total() const { return anomalous[0] + anomalous[1] + uncertain[0] + uncertain[1] + random; }
};

/// Largest-remainder rounding of (a Q/2, a Q/2, z Q/2, z Q/2, r Q) with ties
/// resolved in that order. A positive anomaly (uncertainty) share always gets
/// at least one slot in total. Counts sum to Q.
QueryCounts allocate_counts(const QueryFractions& fractions, int q);

struct QueryItem {
  std::size_t index = 0;  ///< dataset row
  double prob = 0.0;      ///< re-centered malicious probability
  Label predicted = 0;
  bool anomalous = false;
  bool uncertain = false;
  bool random = false;
};

struct QueryBatch {
  std::vector<QueryItem> items;
  int q_a = 0;
  int q_z = 0;
  int q_r = 0;

  std::size_t size() const { return items.size(); }
  IndexList indices() const;
};

/// Scored unlabeled pool. All spans are parallel to `indices`.
struct ScoredPool {
  std::span<const std::size_t> indices;
  std::span<const double> prob;
  std::span<const Label> predicted;
  std::span<const double> anomaly;
  std::span<const double> certainty;
};

/// Per predicted class, the top anomalies and least-certain rows (class
/// shortfalls filled from the other class); items chosen twice carry both
/// flags and the physical gap is topped up with random rows. Throws
/// PoolExhaustedError when the pool is smaller than the batch.
QueryBatch build_query_batch(const ScoredPool& pool, const QueryCounts& counts, Engine& rng);

/// Q uniform draws from the pool, all flagged random; no scores needed.
QueryBatch random_batch(std::span<const std::size_t> indices, std::span<const double> prob,
                        std::span<const Label> predicted, int q, Engine& rng);

enum class StaticQuery { kAnomOnly, kUncertOnly, kRandOnly, kBasic5050 };

/// Fixed fractions for the static query functions (rand_only has no scores
/// and returns (0, 0, 1)).
QueryFractions static_fractions(StaticQuery kind);

}  // namespace jasmine
