#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "jasmine/config.hpp"
#include "jasmine/learner.hpp"
#include "jasmine/stats.hpp"
#include "jasmine/tuning.hpp"

namespace jasmine {

/// Phase 1 for one simulation: tuned (or configured) GBM and Jasmine
/// parameters, computed on L(0) only.
struct PhaseOne {
  GbmHyperParams gbm;
  JasmineParams jasmine;
  std::optional<GbmTuneReport> gbm_report;
  std::optional<JasmineTuneReport> jasmine_report;
};

PoolPartition simulation_partition(const ExperimentConfig& config, const LoadedData& data, int sim);

PhaseOne phase_one(const ExperimentConfig& config, const Dataset& data, const PoolPartition& partition, int sim);

LearnerSettings learner_settings(const ExperimentConfig& config, Method method, const PhaseOne& phase);

struct MethodRun {
  int sim = 0;
  Method method = Method::kJasMain;
  std::vector<IterationRecord> history;
  StopReason stop = StopReason::kCompleted;
  std::size_t charged = 0;
  std::size_t repeats = 0;
  double seconds = 0.0;
};

struct ExperimentResult {
  std::vector<MethodRun> runs;
  std::vector<LearningCurve> curves;
  std::vector<double> coin1;  ///< per sim, on that sim's evaluation set
  std::vector<PhaseOne> phases;
  std::filesystem::path out;
};

/// fractions.csv columns.
std::string fractions_header();
std::string fractions_row(int sim, Method method, const IterationRecord& row);

/// Run every (sim, method) pair, appending rows to learning_curves.csv and
/// fractions.csv as they complete, then write coin1.csv, areas.csv,
/// wilcoxon.csv, mean_curves.csv, tuning reports and run_meta.txt into
/// config.out. `log` receives progress lines when non-null.
ExperimentResult run_experiment(const ExperimentConfig& config, const LoadedData& data, std::ostream* log = nullptr);

}  // namespace jasmine
