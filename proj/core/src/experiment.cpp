#include "jasmine/experiment.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "jasmine/report.hpp"
#include "text_util.hpp"

namespace jasmine {

using detail::format_number;

PoolPartition simulation_partition(const ExperimentConfig& config, const LoadedData& data, int sim) {
  return partition(data.data.size(), config.initial_labeled, config.evaluation, data.fixed_eval,
                   partition_seed(config.seed, sim));
}

PhaseOne phase_one(const ExperimentConfig& config, const Dataset& data, const PoolPartition& partition, int sim) {
  PhaseOne phase;
  phase.gbm = config.gbm;
  phase.jasmine = config.jasmine;
  const SeedPath root = SeedPath(config.seed).with("sim").with(static_cast<std::uint64_t>(sim));
  if (config.tune_gbm) {
    TrainingPool pool{&data.features, partition.labeled, {}};
    for (std::size_t i : partition.labeled) pool.labels.push_back(data.labels[i]);
    GbmTuneBudget budget{config.gbm_tune_max_combos, config.gbm_tune_seconds, config.gbm_timing};
    phase.gbm_report = tune_gbm(pool, GbmSearchSpace::named(config.gbm_space), budget, config.gbm_epsilon,
                                config.folds, root.with("tune-gbm").seed());
    phase.gbm = phase.gbm_report->params;
  }
  const bool uses_jasmine =
      std::find(config.methods.begin(), config.methods.end(), Method::kJasMain) != config.methods.end();
  if (config.tune_jasmine && uses_jasmine) {
    JasmineTuneSettings settings;
    settings.q = config.q;
    settings.sims = config.jasmine_tune_sims;
    settings.folds = config.folds;
    settings.gbm = phase.gbm;
    settings.iforest = config.iforest;
    phase.jasmine_report = jasmine_tune(data, partition.labeled, settings, root.with("tune-jasmine").seed());
    phase.jasmine = phase.jasmine_report->params;
  }
  return phase;
}

LearnerSettings learner_settings(const ExperimentConfig& config, Method method, const PhaseOne& phase) {
  LearnerSettings s;
  s.method = method;
  s.q = config.q;
  s.iterations = config.iterations();
  s.folds = config.folds;
  s.jasmine = phase.jasmine;
  s.gbm = phase.gbm;
  s.iforest = config.iforest;
  s.logreg = config.logreg;
  return s;
}

std::string fractions_header() {
  return "sim,method,t,labeled,alpha_a,alpha_z,alpha_r,delta_a,delta_z,delta,delta_gamma,q_a,q_z,q_r,"
         "degenerate,classifier,theta\n";
}

std::string fractions_row(int sim, Method method, const IterationRecord& row) {
  std::ostringstream o;
  o << sim << ',' << method_name(method) << ',' << row.t << ',' << row.labeled << ','
    << format_number(row.fractions.alpha_a) << ',' << format_number(row.fractions.alpha_z) << ','
    << format_number(row.fractions.alpha_r) << ',';
  if (row.deltas) {
    o << format_number(row.deltas->delta_a) << ',' << format_number(row.deltas->delta_z) << ','
      << format_number(row.deltas->delta) << ',' << format_number(row.deltas->delta_gamma) << ',';
  } else {
    o << ",,,,";
  }
  o << row.q_a << ',' << row.q_z << ',' << row.q_r << ',' << (row.degenerate ? 1 : 0) << ',' << to_string(row.kind)
    << ',' << format_number(row.theta) << '\n';
  return o.str();
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

const char* stop_name(StopReason r) {
  switch (r) {
    case StopReason::kRunning: return "running";
    case StopReason::kCompleted: return "completed";
    case StopReason::kPoolExhausted: return "pool-exhausted";
  }
  return "unknown";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const LoadedData& data, std::ostream* log) {
  config.validate();
  data.data.validate();
  const auto& ds = data.data;
  std::filesystem::create_directories(config.out);

  ExperimentResult result;
  result.out = config.out;
  auto curves_out = open_out(config.out / "learning_curves.csv");
  auto fractions_out = open_out(config.out / "fractions.csv");
  curves_out << learning_curve_header() << std::flush;
  fractions_out << fractions_header() << std::flush;

  const auto started = std::chrono::steady_clock::now();
  std::ostringstream meta_sims;
  for (int sim = 0; sim < config.sims; ++sim) {
    const auto part = simulation_partition(config, data, sim);
    std::vector<Label> eval_truth;
    for (std::size_t i : part.evaluation) eval_truth.push_back(ds.labels[i]);
    result.coin1.push_back(eval_truth.empty() ? 0.0 : coin1_f1(eval_truth));

    PhaseOne phase;
    try {
      phase = phase_one(config, ds, part, sim);
    } catch (const std::exception& e) {
      throw std::runtime_error("sim " + std::to_string(sim) + ", phase 1: " + e.what());
    }
    if (phase.gbm_report) {
      open_out(config.out / ("tuning_gbm_sim" + std::to_string(sim) + ".csv")) << gbm_tune_csv(*phase.gbm_report);
    }
    if (phase.jasmine_report) {
      open_out(config.out / ("tuning_jasmine_sim" + std::to_string(sim) + ".csv"))
          << jasmine_tune_csv(*phase.jasmine_report);
    }
    meta_sims << "sim " << sim << " partition_seed " << part.seed << " L0 " << part.labeled.size() << " U0 "
              << part.unlabeled.size() << " E " << part.evaluation.size() << '\n'
              << "sim " << sim << " gbm " << phase.gbm.describe() << '\n'
              << "sim " << sim << " jasmine alpha_a0=" << format_number(phase.jasmine.alpha_a0)
              << " beta=" << format_number(phase.jasmine.beta) << " gamma=" << format_number(phase.jasmine.gamma)
              << " tau=" << format_number(phase.jasmine.tau) << '\n';
    if (log) {
      *log << "sim " << sim << ": L0=" << part.labeled.size() << " U0=" << part.unlabeled.size()
           << " E=" << part.evaluation.size() << " coin1=" << format_number(result.coin1.back()) << '\n';
    }

    for (Method method : config.methods) {
      const auto settings = learner_settings(config, method, phase);
      LearningCurve curve{method_name(method), sim, {}};
      MethodRun run;
      run.sim = sim;
      run.method = method;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto sim_result = simulate(ds, part, settings, run_seeds(config.seed, sim, method), [&](const IterationRecord& row) {
          const CurvePoint point{row.t, row.labeled, row.f1.value_or(0.0)};
          curve.points.push_back(point);
          curves_out << learning_curve_row(sim, curve.method, point) << std::flush;
          fractions_out << fractions_row(sim, method, row) << std::flush;
        });
        run.history = std::move(sim_result.history);
        run.stop = sim_result.stop;
        run.charged = sim_result.charged;
        run.repeats = sim_result.repeats;
      } catch (const std::exception& e) {
        throw std::runtime_error("sim " + std::to_string(sim) + ", method " + curve.method + ": " + e.what());
      }
      run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      meta_sims << "sim " << sim << " method " << curve.method << " stop " << stop_name(run.stop) << " rows "
                << run.history.size() << " charged " << run.charged << " repeats " << run.repeats << " seconds "
                << format_number(run.seconds) << '\n';
      if (log) {
        *log << "  " << curve.method << ": final F1=" << format_number(curve.points.back().metric) << " ("
             << run.history.size() - 1 << " iterations, " << format_number(run.seconds) << " s)\n";
      }
      result.curves.push_back(std::move(curve));
      result.runs.push_back(std::move(run));
    }
    result.phases.push_back(std::move(phase));
  }

  {
    auto coin = open_out(config.out / "coin1.csv");
    coin << "sim,f1\n";
    for (std::size_t s = 0; s < result.coin1.size(); ++s) coin << s << ',' << format_number(result.coin1[s]) << '\n';
  }
  write_statistics(result.curves, default_tref_grid(config.iterations()), config.out);

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  auto meta = open_out(config.out / "run_meta.txt");
  meta << "jasmine run\n"
       << "config_hash " << config.hash() << '\n'
       << "dataset " << ds.name << " rows " << ds.size() << " features " << ds.width() << " malicious_fraction "
       << format_number(ds.malicious_fraction()) << '\n'
       << "T " << config.iterations() << '\n'
       << "hardware_threads " << std::thread::hardware_concurrency() << '\n'
#if defined(__VERSION__)
       << "compiler " << __VERSION__ << '\n'
#endif
       << "seconds " << format_number(total) << '\n'
       << meta_sims.str() << "--- config ---\n"
       << config.serialize();
  return result;
}

}  // namespace jasmine
