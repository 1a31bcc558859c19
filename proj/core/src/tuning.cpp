#include "jasmine/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "jasmine/learner.hpp"
#include "jasmine/random.hpp"
#include "jasmine/stats.hpp"
#include "text_util.hpp"

namespace jasmine {

std::size_t GbmSearchSpace::size() const {
  return ntrees.size() * max_depth.size() * learn_rate.size() * learn_rate_annealing.size() * sample_rate.size() *
         col_sample_rate.size() * col_sample_rate_per_tree.size() * col_sample_rate_change_per_level.size() *
         min_rows.size() * nbins.size() * nbins_cats.size();
}

GbmHyperParams GbmSearchSpace::at(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("search space index out of range");
  auto take = [&index](const auto& values) {
    const auto v = values[index % values.size()];
    index /= values.size();
    return v;
  };
  GbmHyperParams p;
  p.ntrees = take(ntrees);
  p.max_depth = take(max_depth);
  p.learn_rate = take(learn_rate);
  p.learn_rate_annealing = take(learn_rate_annealing);
  p.sample_rate = take(sample_rate);
  p.col_sample_rate = take(col_sample_rate);
  p.col_sample_rate_per_tree = take(col_sample_rate_per_tree);
  p.col_sample_rate_change_per_level = take(col_sample_rate_change_per_level);
  p.min_rows = take(min_rows);
  p.nbins = take(nbins);
  p.extra["nbins_cats"] = std::to_string(take(nbins_cats));
  p.extra["histogram_type"] = "RoundRobin";
  p.extra["distribution"] = "bernoulli";
  return p;
}

GbmSearchSpace GbmSearchSpace::paper() {
  GbmSearchSpace s;
  s.ntrees = {250, 500, 1000};
  s.max_depth = {6, 12, 24};
  s.learn_rate = {0.02, 0.05, 0.125};
  s.learn_rate_annealing = {0.95, 0.99, 0.999};
  s.sample_rate = {0.60, 0.78, 1.0};
  s.col_sample_rate = {0.84, 0.92, 1.0};
  s.col_sample_rate_per_tree = {0.40, 0.64, 1.0};
  s.col_sample_rate_change_per_level = {0.94, 1.0, 1.06};
  s.min_rows = {6, 8, 10};
  s.nbins = {10, 16, 25};
  s.nbins_cats = {16, 32, 64};
  return s;
}

GbmSearchSpace GbmSearchSpace::desk() {
  GbmSearchSpace s = paper();
  s.ntrees = {25, 50, 100};
  s.max_depth = {3, 5, 8};
  return s;
}

GbmSearchSpace GbmSearchSpace::named(std::string_view name) {
  if (name == "paper") return paper();
  if (name == "desk") return desk();
  throw std::invalid_argument("unknown search space '" + std::string(name) + "'");
}

std::size_t select_tradeoff(std::vector<TuneResult>& results, double epsilon) {
  if (results.empty()) throw TuningError("tuning: no combination evaluated");
  std::size_t best = 0;
  for (std::size_t j = 1; j < results.size(); ++j) {
    const auto& r = results[j];
    const auto& b = results[best];
    if (r.metric > b.metric || (r.metric == b.metric && r.cost < b.cost)) best = j;
  }
  std::size_t chosen = best;
  double best_d = 0.0;
  bool replaced = false;
  for (std::size_t j = 0; j < results.size(); ++j) {
    auto& r = results[j];
    r.d_value.reset();
    r.chosen = false;
    if (!(r.cost < results[best].cost)) continue;
    const double d = (results[best].metric - r.metric) / (results[best].cost - r.cost);
    r.d_value = d;
    if (d < epsilon && (!replaced || d < best_d)) {
      chosen = j;
      best_d = d;
      replaced = true;
    }
  }
  results[chosen].chosen = true;
  return chosen;
}

GbmTuneReport tune_gbm(const TrainingPool& pool, const GbmSearchSpace& space, const GbmTuneBudget& budget,
                       double epsilon, int k, std::uint64_t seed) {
  if (!pool.has_both_classes()) throw DegeneratePoolError("GBM tuning needs both classes in L(0)");
  if (budget.max_combos < 1) throw TuningError("tuning: combination budget must be positive");
  const std::size_t total = space.size();
  if (total == 0) throw TuningError("tuning: empty search space");
  const std::size_t draws = std::min<std::size_t>(total, static_cast<std::size_t>(budget.max_combos));
  Engine rng = SeedPath(seed).with("gbm-search").engine();
  const auto order = sample_without_replacement(rng, total, draws);

  GbmTuneReport report;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t combo : order) {
    if (budget.timing == TuneTiming::kWall && !report.results.empty()) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed >= budget.seconds) break;
    }
    TuneResult r;
    r.combo = combo;
    r.params = space.at(combo);
    const auto t0 = std::chrono::steady_clock::now();
    const auto cv = cross_validate_gbm(pool, r.params, k, SeedPath(seed).with("cv").seed());
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.metric = cv.f1;
    r.work = cv.work;
    r.cost = budget.timing == TuneTiming::kWall ? r.seconds : static_cast<double>(r.work);
    report.results.push_back(std::move(r));
  }
  report.chosen = select_tradeoff(report.results, epsilon);
  report.params = report.results[report.chosen].params;
  return report;
}

JasmineParams JasmineGrid::at(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("grid index out of range");
  JasmineParams p;
  p.tau = tau[index % tau.size()];
  index /= tau.size();
  p.gamma = gamma[index % gamma.size()];
  index /= gamma.size();
  p.beta = beta[index % beta.size()];
  index /= beta.size();
  p.alpha_a0 = alpha_a0[index];
  return p;
}

JasmineGrid JasmineGrid::paper() {
  return {{0.25, 0.5, 0.75}, {0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}, {1.0 / 800, 1.0 / 400, 1.0 / 200, 1.0 / 100}};
}

int tuning_query_size(std::size_t unlabeled, int q) {
  return static_cast<int>(std::min<std::size_t>(unlabeled / 4, static_cast<std::size_t>(q)));
}

int tuning_iterations(std::size_t unlabeled, int q_j) {
  if (q_j < 1) throw std::invalid_argument("tuning query size must be positive");
  const std::size_t q = static_cast<std::size_t>(q_j);
  return static_cast<int>((unlabeled + q - 1) / q) - 1;
}

JasmineTunePartition make_tune_partition(std::span<const Label> labels, int q, std::uint64_t seed, int attempts) {
  std::array<IndexList, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Engine rng = SeedPath(seed).with("tune-partition").with(static_cast<std::uint64_t>(attempt)).engine();
    JasmineTunePartition part;
    for (auto members : by_class) {
      shuffle(members, rng);
      const std::size_t n = members.size();
      const auto n_l = static_cast<std::size_t>(std::lround(0.4 * static_cast<double>(n)));
      const auto n_u = std::min(n - n_l, static_cast<std::size_t>(std::lround(0.4 * static_cast<double>(n))));
      part.labeled.insert(part.labeled.end(), members.begin(), members.begin() + n_l);
      part.unlabeled.insert(part.unlabeled.end(), members.begin() + n_l, members.begin() + n_l + n_u);
      part.evaluation.insert(part.evaluation.end(), members.begin() + n_l + n_u, members.end());
    }
    bool both = false;
    bool seen[2] = {false, false};
    for (std::size_t i : part.labeled) seen[labels[i] ? 1 : 0] = true;
    both = seen[0] && seen[1];
    // With one class too small to stratify, fall back to a plain shuffle.
    if (!both) {
      IndexList all(labels.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      shuffle(all, rng);
      const auto n_l = static_cast<std::size_t>(std::lround(0.4 * static_cast<double>(all.size())));
      const auto n_u = static_cast<std::size_t>(std::lround(0.4 * static_cast<double>(all.size())));
      part.labeled.assign(all.begin(), all.begin() + n_l);
      part.unlabeled.assign(all.begin() + n_l, all.begin() + n_l + n_u);
      part.evaluation.assign(all.begin() + n_l + n_u, all.end());
      seen[0] = seen[1] = false;
      for (std::size_t i : part.labeled) seen[labels[i] ? 1 : 0] = true;
      both = seen[0] && seen[1];
    }
    if (!both) continue;
    std::sort(part.labeled.begin(), part.labeled.end());
    std::sort(part.unlabeled.begin(), part.unlabeled.end());
    std::sort(part.evaluation.begin(), part.evaluation.end());
    part.q = tuning_query_size(part.unlabeled.size(), q);
    if (part.q < 2) throw TuningError("Jasmine tuning infeasible: L(0) too small for a query batch");
    part.iterations = tuning_iterations(part.unlabeled.size(), part.q);
    return part;
  }
  throw TuningError("Jasmine tuning infeasible: every partition of L(0) left a single class in L_J(0)");
}

JasmineTuneReport jasmine_tune(const Dataset& data, std::span<const std::size_t> initial_labeled,
                               const JasmineTuneSettings& settings, std::uint64_t seed) {
  if (settings.sims < 1) throw std::invalid_argument("Jasmine tuning needs at least one simulation");
  const std::size_t combos = settings.grid.size();
  if (combos == 0) throw TuningError("Jasmine tuning: empty grid");
  // The inner runs only ever see this copy.
  const Dataset local = data.subset(initial_labeled);

  JasmineTuneReport report;
  report.rows.resize(combos);
  for (std::size_t j = 0; j < combos; ++j) {
    report.rows[j].combo = j;
    report.rows[j].params = settings.grid.at(j);
  }
  const SeedPath root = SeedPath(seed).with("jasmine-tune");
  for (int s = 0; s < settings.sims; ++s) {
    const SeedPath sim = root.with(static_cast<std::uint64_t>(s));
    auto part = make_tune_partition(local.labels, settings.q, sim.with("partition").seed());
    PoolPartition pools{part.labeled, part.unlabeled, part.evaluation, sim.seed()};
    for (std::size_t j = 0; j < combos; ++j) {
      LearnerSettings ls;
      ls.method = Method::kJasMain;
      ls.q = part.q;
      ls.iterations = part.iterations - 1;
      ls.folds = settings.folds;
      ls.jasmine = report.rows[j].params;
      ls.gbm = settings.gbm;
      ls.iforest = settings.iforest;
      const auto result = simulate(local, pools, ls, sim.with("run"));
      std::vector<double> p;
      for (const auto& row : result.history) p.push_back(row.f1.value_or(0.0));
      report.rows[j].areas.push_back(trapezoid_area(p));
    }
    report.partitions.push_back(std::move(part));
  }
  for (auto& row : report.rows) {
    double sum = 0.0;
    for (double a : row.areas) sum += a;
    row.mean_area = sum / static_cast<double>(row.areas.size());
  }
  for (std::size_t j = 1; j < combos; ++j) {
    if (report.rows[j].mean_area > report.rows[report.chosen].mean_area) report.chosen = j;
  }
  report.rows[report.chosen].chosen = true;
  report.params = report.rows[report.chosen].params;
  return report;
}

std::string gbm_tune_csv(const GbmTuneReport& report) {
  using detail::format_number;
  std::ostringstream o;
  o << "order,combo,ntrees,max_depth,learn_rate,learn_rate_annealing,sample_rate,col_sample_rate,"
       "col_sample_rate_per_tree,col_sample_rate_change_per_level,min_rows,nbins,nbins_cats,metric,seconds,work,"
       "cost,d_value,chosen\n";
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const auto& r = report.results[i];
    const auto& p = r.params;
    const auto cats = p.extra.count("nbins_cats") ? p.extra.at("nbins_cats") : std::string();
    o << i << ',' << r.combo << ',' << p.ntrees << ',' << p.max_depth << ',' << format_number(p.learn_rate) << ','
      << format_number(p.learn_rate_annealing) << ',' << format_number(p.sample_rate) << ','
      << format_number(p.col_sample_rate) << ',' << format_number(p.col_sample_rate_per_tree) << ','
      << format_number(p.col_sample_rate_change_per_level) << ',' << p.min_rows << ',' << p.nbins << ',' << cats
      << ',' << format_number(r.metric) << ',' << format_number(r.seconds) << ',' << r.work << ','
      << format_number(r.cost) << ',' << (r.d_value ? format_number(*r.d_value) : std::string()) << ','
      << (r.chosen ? 1 : 0) << '\n';
  }
  return o.str();
}

std::string jasmine_tune_csv(const JasmineTuneReport& report) {
  using detail::format_number;
  std::ostringstream o;
  o << "combo,alpha_a0,beta,gamma,tau";
  const std::size_t sims = report.rows.empty() ? 0 : report.rows.front().areas.size();
  for (std::size_t s = 0; s < sims; ++s) o << ",area_" << s;
  o << ",mean_area,chosen\n";
  for (const auto& row : report.rows) {
    o << row.combo << ',' << format_number(row.params.alpha_a0) << ',' << format_number(row.params.beta) << ','
      << format_number(row.params.gamma) << ',' << format_number(row.params.tau);
    for (double a : row.areas) o << ',' << format_number(a);
    o << ',' << format_number(row.mean_area) << ',' << (row.chosen ? 1 : 0) << '\n';
  }
  return o.str();
}

}  // namespace jasmine
