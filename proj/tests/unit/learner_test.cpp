#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "jasmine/experiment.hpp"
#include "jasmine/learner.hpp"

using namespace jasmine;

namespace {

struct Fixture {
  Dataset data = testing::small_synthetic(600, 12);
  PoolPartition part = partition(600, 40, 150, std::nullopt, 3);

  LearnerSettings settings(Method m, int iterations = 4) const {
    LearnerSettings s;
    s.method = m;
    s.q = 10;
    s.iterations = iterations;
    s.folds = 3;
    s.gbm.ntrees = 10;
    s.gbm.max_depth = 3;
    s.gbm.min_rows = 3;
    s.iforest = {30, 64};
    return s;
  }
  std::vector<Label> initial() const {
    std::vector<Label> y;
    for (auto i : part.labeled) y.push_back(data.labels[i]);
    return y;
  }
};

bool same_rows(const std::vector<IterationRecord>& a, const std::vector<IterationRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.t != y.t || x.labeled != y.labeled || x.f1 != y.f1 || x.fractions.alpha_a != y.fractions.alpha_a ||
        x.fractions.alpha_z != y.fractions.alpha_z || x.fractions.alpha_r != y.fractions.alpha_r ||
        x.q_a != y.q_a || x.q_z != y.q_z || x.q_r != y.q_r || x.theta != y.theta ||
        x.deltas.has_value() != y.deltas.has_value()) {
      return false;
    }
    if (x.deltas && (x.deltas->delta_a != y.deltas->delta_a || x.deltas->delta_z != y.deltas->delta_z)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("learner") {
  TEST_CASE("each iteration moves exactly Q rows from U to L") {
    Fixture f;
    Learner l(f.data, f.part, f.initial(), f.settings(Method::kJasMain), SeedPath(1));
    SimulatedOracle oracle(f.data);
    CHECK(l.history().size() == 1);
    CHECK(l.history()[0].t == 0);
    CHECK_FALSE(l.history()[0].deltas.has_value());
    std::set<std::size_t> eval(f.part.evaluation.begin(), f.part.evaluation.end());
    while (!l.finished()) {
      const auto before_l = l.labeled().size();
      const auto before_u = l.unlabeled().size();
      const auto idx = l.pending()->indices();
      for (auto i : idx) {
        CHECK(std::find(l.unlabeled().begin(), l.unlabeled().end(), i) != l.unlabeled().end());
        CHECK(eval.count(i) == 0);
      }
      const auto& row = l.submit(oracle.label(idx));
      CHECK(l.labeled().size() == before_l + 10);
      CHECK(l.unlabeled().size() == before_u - 10);
      CHECK(row.labeled == 40 + 10 * static_cast<std::size_t>(row.t));
      CHECK(row.fractions.sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(fractions_valid(row.fractions, l.schedule()));
    }
    CHECK(l.stop_reason() == StopReason::kCompleted);
    CHECK(l.history().size() == 5);
    CHECK(oracle.charged() == 40);
    CHECK(oracle.repeats().empty());
    CHECK(l.pending() == nullptr);
  }

  TEST_CASE("simulate charges N labels and is deterministic") {
    Fixture f;
    auto a = simulate(f.data, f.part, f.settings(Method::kJasMain), SeedPath(5));
    auto b = simulate(f.data, f.part, f.settings(Method::kJasMain), SeedPath(5));
    CHECK(a.charged == 40);
    CHECK(a.repeats == 0);
    CHECK(same_rows(a.history, b.history));
    int rows = 0;
    simulate(f.data, f.part, f.settings(Method::kJasMain), SeedPath(5), [&](const IterationRecord&) { ++rows; });
    CHECK(rows == 5);
  }

  TEST_CASE("static methods keep their fractions") {
    Fixture f;
    for (Method m : {Method::kJasBasic, Method::kJasAnom, Method::kJasUncert, Method::kJasRand}) {
      auto r = simulate(f.data, f.part, f.settings(m), SeedPath(2));
      for (const auto& row : r.history) {
        CHECK(row.fractions.alpha_a == r.history[0].fractions.alpha_a);
        CHECK(row.fractions.alpha_z == r.history[0].fractions.alpha_z);
        CHECK(row.fractions.alpha_r == r.history[0].fractions.alpha_r);
        CHECK_FALSE(row.deltas.has_value());
      }
    }
    auto rand = simulate(f.data, f.part, f.settings(Method::kJasRand), SeedPath(2));
    for (std::size_t t = 1; t < rand.history.size(); ++t) CHECK(rand.history[t].q_r == 10);
    auto basic = simulate(f.data, f.part, f.settings(Method::kJasBasic), SeedPath(2));
    CHECK(basic.history[0].fractions.alpha_a == 0.5);
  }

  TEST_CASE("jas.main records deltas and moves its fractions") {
    Fixture f;
    auto r = simulate(f.data, f.part, f.settings(Method::kJasMain, 6), SeedPath(3));
    bool any_delta = false;
    for (std::size_t t = 1; t < r.history.size(); ++t) {
      const auto& row = r.history[t];
      CHECK(row.fractions.t == row.t);
      if (row.deltas) {
        any_delta = true;
        CHECK(row.deltas->delta == row.deltas->delta_a - row.deltas->delta_z);
      }
    }
    CHECK(any_delta);
    CHECK(r.history.back().fractions.alpha_r < r.history.front().fractions.alpha_r);
  }

  TEST_CASE("ALADIN-lite uses logistic regression and fixed halves") {
    Fixture f;
    auto r = simulate(f.data, f.part, f.settings(Method::kAlaMain), SeedPath(4));
    for (const auto& row : r.history) {
      CHECK(row.kind == ClassifierKind::kLogReg);
      CHECK(row.fractions.alpha_a == 0.5);
      CHECK(row.fractions.alpha_z == 0.5);
      CHECK(row.fractions.alpha_r == 0.0);
    }
  }

  TEST_CASE("a single-class L(0) falls back to a constant model and random batches") {
    Fixture f;
    IndexList benign;
    for (std::size_t i = 0; i < f.data.size() && benign.size() < 20; ++i) {
      if (f.data.labels[i] == 0) benign.push_back(i);
    }
    PoolPartition p;
    std::set<std::size_t> used(benign.begin(), benign.end());
    p.labeled = benign;
    for (std::size_t i = 0; i < f.data.size(); ++i) {
      if (used.count(i)) continue;
      (p.evaluation.size() < 100 ? p.evaluation : p.unlabeled).push_back(i);
    }
    std::vector<Label> y(20, 0);
    Learner l(f.data, p, y, f.settings(Method::kJasMain), SeedPath(6));
    CHECK(l.history()[0].degenerate);
    CHECK(l.history()[0].kind == ClassifierKind::kConstant);
    CHECK(l.pending()->q_r == 10);
    const auto fr0 = l.fractions();
    SimulatedOracle oracle(f.data);
    l.submit(oracle.label(l.pending()->indices()));
    CHECK(l.fractions().t == 1);
    CHECK(l.fractions().alpha_r == l.schedule().alpha_r(1));
    CHECK(l.fractions().alpha_a == doctest::Approx(l.schedule().rescale(0, fr0.alpha_a)));
  }

  TEST_CASE("pool exhaustion stops early") {
    Fixture f;
    auto part = partition(120, 40, 60, std::nullopt, 1);  // 20 unlabeled
    auto small = f.data.subset([] {
      IndexList i(120);
      for (std::size_t k = 0; k < 120; ++k) i[k] = k;
      return i;
    }());
    auto r = simulate(small, part, f.settings(Method::kJasMain, 10), SeedPath(1));
    CHECK(r.stop == StopReason::kPoolExhausted);
    CHECK(r.history.size() == 3);
    CHECK(r.charged == 20);
  }

  TEST_CASE("only submitted labels are used") {
    Fixture f;
    auto scrambled = f.data;
    for (auto i : f.part.unlabeled) scrambled.labels[i] = 1 - scrambled.labels[i];
    const auto s = f.settings(Method::kJasMain);
    Learner honest(f.data, f.part, f.initial(), s, SeedPath(8));
    Learner blind(scrambled, f.part, f.initial(), s, SeedPath(8));
    while (!honest.finished()) {
      std::vector<Label> y;
      for (auto i : honest.pending()->indices()) y.push_back(f.data.labels[i]);
      REQUIRE(blind.pending()->indices() == honest.pending()->indices());
      honest.submit(y);
      blind.submit(y);
    }
    CHECK(same_rows(honest.history(), blind.history()));
  }

  TEST_CASE("label vectors must match the batch") {
    Fixture f;
    Learner l(f.data, f.part, f.initial(), f.settings(Method::kJasMain), SeedPath(1));
    std::vector<Label> short_labels(9, 0);
    CHECK_THROWS_AS(l.submit(short_labels), LabelMismatchError);
    std::vector<Label> bad(10, 2);
    CHECK_THROWS_AS(l.submit(bad), LabelMismatchError);
    CHECK(l.t() == 0);
    CHECK(l.pending() != nullptr);
  }

  TEST_CASE("oracle bookkeeping") {
    Fixture f;
    SimulatedOracle o(f.data);
    IndexList idx{1, 2, 1};
    auto y = o.label(idx);
    CHECK(y[0] == f.data.labels[1]);
    CHECK(o.charged() == 2);
    CHECK(o.repeats() == IndexList{1});
    IndexList bad{100000};
    CHECK_THROWS_AS(o.label(bad), std::out_of_range);
  }

  TEST_CASE("iteration count at full scale") {
    auto c = ExperimentConfig::preset("paper");
    CHECK(c.q == 40);
    CHECK(c.iterations() == 375);
  }

  TEST_CASE("seed paths separate sims and methods") {
    CHECK(run_seeds(1, 0, Method::kJasMain).seed() != run_seeds(1, 1, Method::kJasMain).seed());
    CHECK(run_seeds(1, 0, Method::kJasMain).seed() != run_seeds(1, 0, Method::kJasRand).seed());
    CHECK(partition_seed(1, 0) != partition_seed(1, 1));
    CHECK(partition_seed(1, 0) == partition_seed(1, 0));
  }
}
