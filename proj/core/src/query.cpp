#include "jasmine/query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jasmine {

double certainty_score(double prob) { return 2.0 * std::abs(prob - 0.5); }

IndexList QueryBatch::indices() const {
  IndexList out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.index);
  return out;
}

QueryCounts allocate_counts(const QueryFractions& fractions, int q) {
  if (q < 1) throw std::invalid_argument("allocate_counts: Q must be positive");
  const double qd = static_cast<double>(q);
  const std::array<double, 5> target = {fractions.alpha_a * qd / 2.0, fractions.alpha_a * qd / 2.0,
                                        fractions.alpha_z * qd / 2.0, fractions.alpha_z * qd / 2.0,
                                        fractions.alpha_r * qd};
  std::array<int, 5> n{};
  int assigned = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    n[i] = static_cast<int>(std::floor(target[i] + 1e-9));
    n[i] = std::max(n[i], 0);
    assigned += n[i];
  }
  // Largest remainder; stable order breaks ties a0, a1, z0, z1, r.
  std::array<std::size_t, 5> order = {0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return target[x] - n[x] > target[y] - n[y] + 1e-12;
  });
  for (std::size_t k = 0; assigned < q; k = (k + 1) % 5) {
    ++n[order[k]];
    ++assigned;
  }
  for (std::size_t k = 4; assigned > q; k = (k + 4) % 5) {
    if (n[order[k]] > 0) {
      --n[order[k]];
      --assigned;
    }
  }

  // Guarantee at least one anomaly and one uncertainty when their share is
  // positive, taking the slot from the most over-served category.
  auto group_total = [&](std::size_t i) {
    return i < 2 ? n[0] + n[1] : (i < 4 ? n[2] + n[3] : n[4]);
  };
  auto guaranteed = [&](std::size_t i) {
    return (i < 2 && fractions.alpha_a > 0.0) || (i >= 2 && i < 4 && fractions.alpha_z > 0.0);
  };
  auto ensure = [&](std::size_t first, double share) {
    if (share <= 0.0 || group_total(first) > 0) return;
    const std::size_t to =
        (target[first + 1] - n[first + 1] > target[first] - n[first]) ? first + 1 : first;
    std::size_t from = 5;
    double surplus = -1e300;
    for (std::size_t i = 0; i < 5; ++i) {
      if (i == first || i == first + 1 || n[i] == 0) continue;
      if (guaranteed(i) && group_total(i) == 1) continue;
      const double s = n[i] - target[i];
      if (s > surplus + 1e-12) {
        surplus = s;
        from = i;
      }
    }
    if (from == 5) return;
    --n[from];
    ++n[to];
  };
  ensure(0, fractions.alpha_a);
  ensure(2, fractions.alpha_z);

  QueryCounts c;
  c.anomalous = {n[0], n[1]};
  c.uncertain = {n[2], n[3]};
  c.random = n[4];
  return c;
}

namespace {

// Positions (into the pool arrays) of each predicted class, ranked by `key`
// ascending, ties by ascending dataset row.
std::array<std::vector<std::size_t>, 2> rank_by_class(const ScoredPool& pool,
                                                      std::span<const double> key, bool descending) {
  std::array<std::vector<std::size_t>, 2> out;
  for (std::size_t i = 0; i < pool.indices.size(); ++i) out[pool.predicted[i] ? 1 : 0].push_back(i);
  for (auto& list : out) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (key[a] != key[b]) return descending ? key[a] > key[b] : key[a] < key[b];
      return pool.indices[a] < pool.indices[b];
    });
  }
  return out;
}

// Takes demand[c] from class c; a class that runs short hands its remainder
// to the other class.
std::vector<std::size_t> take_ranked(const std::array<std::vector<std::size_t>, 2>& ranked,
                                     const std::array<int, 2>& demand) {
  std::array<std::size_t, 2> take{};
  std::size_t leftover = 0;
  for (int c = 0; c < 2; ++c) {
    const std::size_t want = static_cast<std::size_t>(demand[c]);
    take[c] = std::min(want, ranked[c].size());
    leftover += want - take[c];
  }
  for (int c = 0; c < 2 && leftover > 0; ++c) {
    const std::size_t extra = std::min(leftover, ranked[c].size() - take[c]);
    take[c] += extra;
    leftover -= extra;
  }
  std::vector<std::size_t> out;
  for (int c = 0; c < 2; ++c) out.insert(out.end(), ranked[c].begin(), ranked[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
  return out;
}

QueryItem make_item(const ScoredPool& pool, std::size_t pos) {
  QueryItem item;
  item.index = pool.indices[pos];
  item.prob = pool.prob[pos];
  item.predicted = pool.predicted[pos];
  return item;
}

}  // namespace

QueryBatch build_query_batch(const ScoredPool& pool, const QueryCounts& counts, Engine& rng) {
  const std::size_t q = static_cast<std::size_t>(counts.total());
  const std::size_t n = pool.indices.size();
  if (n < q) throw PoolExhaustedError("unlabeled pool smaller than the query size");

  const auto by_anomaly = rank_by_class(pool, pool.anomaly, /*descending=*/true);
  const auto by_certainty = rank_by_class(pool, pool.certainty, /*descending=*/false);
  const auto anomalous = take_ranked(by_anomaly, counts.anomalous);
  const auto uncertain = take_ranked(by_certainty, counts.uncertain);

  QueryBatch batch;
  std::vector<int> slot(n, -1);
  for (std::size_t pos : anomalous) {
    slot[pos] = static_cast<int>(batch.items.size());
    batch.items.push_back(make_item(pool, pos));
    batch.items.back().anomalous = true;
  }
  for (std::size_t pos : uncertain) {
    if (slot[pos] < 0) {
      slot[pos] = static_cast<int>(batch.items.size());
      batch.items.push_back(make_item(pool, pos));
    }
    batch.items[static_cast<std::size_t>(slot[pos])].uncertain = true;
  }

  const std::size_t want_random = q - batch.items.size();
  std::vector<std::size_t> rest;
  rest.reserve(n - batch.items.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] < 0) rest.push_back(i);
  }
  for (std::size_t k : sample_without_replacement(rng, rest.size(), want_random)) {
    batch.items.push_back(make_item(pool, rest[k]));
    batch.items.back().random = true;
  }
  for (const auto& item : batch.items) {
    batch.q_a += item.anomalous;
    batch.q_z += item.uncertain;
    batch.q_r += item.random;
  }
  return batch;
}

QueryBatch random_batch(std::span<const std::size_t> indices, std::span<const double> prob,
                        std::span<const Label> predicted, int q, Engine& rng) {
  if (q < 0 || indices.size() < static_cast<std::size_t>(q)) {
    throw PoolExhaustedError("unlabeled pool smaller than the query size");
  }
  QueryBatch batch;
  for (std::size_t k : sample_without_replacement(rng, indices.size(), static_cast<std::size_t>(q))) {
    QueryItem item;
    item.index = indices[k];
    item.prob = prob.empty() ? 0.5 : prob[k];
    item.predicted = predicted.empty() ? Label{0} : predicted[k];
    item.random = true;
    batch.items.push_back(item);
  }
  batch.q_r = q;
  return batch;
}

QueryFractions static_fractions(StaticQuery kind) {
  switch (kind) {
    case StaticQuery::kAnomOnly: return {1.0, 0.0, 0.0, 0};
    case StaticQuery::kUncertOnly: return {0.0, 1.0, 0.0, 0};
    case StaticQuery::kRandOnly: return {0.0, 0.0, 1.0, 0};
    case StaticQuery::kBasic5050: return {0.5, 0.5, 0.0, 0};
  }
  return {};
}

}  // namespace jasmine
