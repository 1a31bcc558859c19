#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "jasmine/config.hpp"
#include "jasmine/experiment.hpp"
#include "jasmine/report.hpp"
#include "jasmine/tuning.hpp"

#ifdef JASMINE_WITH_SERVICE
#include "jasmine/http_service.hpp"
#endif

namespace {

using namespace jasmine;

struct CommonOptions {
  std::string config_path;
  std::string scale;
  std::string dataset;
  std::string train;
  std::string test;
  std::string data;
  std::string data_dir;
  std::vector<std::string> methods;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Config file (key = value lines)");
  cmd->add_option("--scale", o.scale, "Preset: smoke, desk or paper")->check(CLI::IsMember({"smoke", "desk", "paper"}));
  cmd->add_option("--dataset", o.dataset, "nslkdd, nslkdd-rand, unsw, csv or synthetic");
  cmd->add_option("--train", o.train, "NSL-KDD train file");
  cmd->add_option("--test", o.test, "NSL-KDD test file");
  cmd->add_option("--data", o.data, "Dataset file (unsw, csv)");
  cmd->add_option("--data-dir", o.data_dir, "Where to look for dataset files (default $JASMINE_DATA_DIR or data/)");
  cmd->add_option("--method", o.methods, "Method(s) to run; repeat or comma-separate")->delimiter(',');
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--set", o.overrides, "Extra config setting key=value (repeatable)");
  cmd->add_flag("--quiet,-q", o.quiet, "No progress output");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.scale.empty() ? ExperimentConfig{} : ExperimentConfig::preset(o.scale);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("config", "cannot open " + o.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg.apply(buf.str());
  }
  if (!o.dataset.empty()) cfg.set("dataset", o.dataset);
  if (!o.train.empty()) cfg.set("train_path", o.train);
  if (!o.test.empty()) cfg.set("test_path", o.test);
  if (!o.data.empty()) cfg.set("data_path", o.data);
  if (!o.methods.empty()) {
    std::string joined;
    for (const auto& m : o.methods) joined += (joined.empty() ? "" : ",") + m;
    cfg.set("methods", joined);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "expected key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.dataset = resolve_data_paths(cfg.dataset, o.data_dir.empty() ? default_data_dir() : std::filesystem::path(o.data_dir));
  cfg.validate();
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const CommonOptions& o) {
  const auto cfg = build_config(o);
  const auto data = load_dataset(cfg.dataset);
  if (!o.quiet) {
    std::cout << "dataset " << data.data.name << ": " << data.data.size() << " rows, " << data.data.width()
              << " features, malicious fraction " << data.data.malicious_fraction() << "\n";
  }
  const auto result = run_experiment(cfg, data, o.quiet ? nullptr : &std::cout);
  if (!o.quiet) std::cout << "wrote " << result.out.string() << "\n";
  return 0;
}

int cmd_tune_gbm(const CommonOptions& o, int sim) {
  auto cfg = build_config(o);
  const auto data = load_dataset(cfg.dataset);
  const auto part = simulation_partition(cfg, data, sim);
  TrainingPool pool{&data.data.features, part.labeled, {}};
  for (std::size_t i : part.labeled) pool.labels.push_back(data.data.labels[i]);
  const GbmTuneBudget budget{cfg.gbm_tune_max_combos, cfg.gbm_tune_seconds, cfg.gbm_timing};
  const auto report = tune_gbm(pool, GbmSearchSpace::named(cfg.gbm_space), budget, cfg.gbm_epsilon, cfg.folds,
                               SeedPath(cfg.seed).with("sim").with(static_cast<std::uint64_t>(sim)).with("tune-gbm").seed());
  write_text(cfg.out / "tuning_gbm.csv", gbm_tune_csv(report));
  const auto& best = report.results[report.chosen];
  std::cout << "evaluated " << report.results.size() << " combinations\n"
            << "chosen: " << best.params.describe() << "\n"
            << "cv F1 " << best.metric << ", " << best.seconds << " s, work " << best.work << "\n";
  return 0;
}

int cmd_tune_jasmine(const CommonOptions& o, int sim) {
  auto cfg = build_config(o);
  const auto data = load_dataset(cfg.dataset);
  const auto part = simulation_partition(cfg, data, sim);
  cfg.tune_jasmine = true;
  if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::kJasMain) == cfg.methods.end()) {
    cfg.methods.push_back(Method::kJasMain);
  }
  const auto phase = phase_one(cfg, data.data, part, sim);
  write_text(cfg.out / "tuning_jasmine.csv", jasmine_tune_csv(*phase.jasmine_report));
  const auto& part0 = phase.jasmine_report->partitions.front();
  std::cout << "Q_J " << part0.q << ", T_J " << part0.iterations << ", grid " << phase.jasmine_report->rows.size()
            << " combinations\n"
            << "chosen: alpha_a0=" << phase.jasmine.alpha_a0 << " beta=" << phase.jasmine.beta
            << " gamma=" << phase.jasmine.gamma << " tau=" << phase.jasmine.tau << " (mean area "
            << phase.jasmine_report->rows[phase.jasmine_report->chosen].mean_area << ")\n";
  return 0;
}

int cmd_report(const std::string& runs, const std::string& reference, int t_max) {
  const std::filesystem::path dir(runs);
  const auto curves = read_learning_curves(dir / "learning_curves.csv");
  if (curves.empty()) throw std::runtime_error("no learning curves in " + dir.string());
  int max_t = t_max;
  if (max_t <= 0) {
    for (const auto& c : curves) max_t = std::max(max_t, c.points.empty() ? 0 : c.points.back().t);
  }
  const auto grid = default_tref_grid(max_t);
  write_statistics(curves, grid, dir, reference);
  const auto stats = compute_statistics(curves, grid, reference);
  std::cout << wilcoxon_csv(stats);
  return 0;
}

int cmd_synth(std::size_t rows, std::size_t features, double fraction, std::uint64_t seed, const std::string& out) {
  SyntheticSpec spec;
  spec.rows = rows;
  spec.features = features;
  spec.malicious_fraction = fraction;
  spec.seed = seed;
  write_csv(make_synthetic(spec), out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

#ifdef JASMINE_WITH_SERVICE
HttpServer* g_server = nullptr;

int cmd_serve(const std::string& host, int port) {
  SessionService service;
  HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  server.listen();
  g_server = nullptr;
  return 0;
}
#endif

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jasmine active learning for network intrusion detection"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Run the experiment matrix (sims x methods) and write statistics");
  add_common(run, run_opts);

  CommonOptions gbm_opts;
  int gbm_sim = 0;
  auto* tune_gbm_cmd = app.add_subcommand("tune-gbm", "Random-search GBM hyperparameters on L(0)");
  add_common(tune_gbm_cmd, gbm_opts);
  tune_gbm_cmd->add_option("--sim", gbm_sim, "Which simulation's L(0) to tune on");

  CommonOptions jas_opts;
  int jas_sim = 0;
  auto* tune_jas_cmd = app.add_subcommand("tune-jasmine", "Grid-search the Jasmine parameters on L(0)");
  add_common(tune_jas_cmd, jas_opts);
  tune_jas_cmd->add_option("--sim", jas_sim, "Which simulation's L(0) to tune on");

  std::string runs_dir = "runs/latest";
  std::string reference = "jas.main";
  int report_t = 0;
  auto* report = app.add_subcommand("report", "Areas and Wilcoxon tables from learning_curves.csv");
  report->add_option("--out,--runs", runs_dir, "Run directory");
  report->add_option("--reference", reference, "Method compared against all others");
  report->add_option("--max-t", report_t, "Largest t_ref (default: longest curve)");

  std::size_t synth_rows = 2000;
  std::size_t synth_features = 8;
  double synth_fraction = 0.4;
  std::uint64_t synth_seed = 1;
  std::string synth_out = "synthetic.csv";
  auto* synth = app.add_subcommand("synth", "Write a synthetic intrusion-like dataset");
  synth->add_option("--rows", synth_rows);
  synth->add_option("--features", synth_features);
  synth->add_option("--malicious-fraction", synth_fraction);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--out", synth_out);

#ifdef JASMINE_WITH_SERVICE
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Start the labeling-session HTTP service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
#endif

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts);
    if (*tune_gbm_cmd) return cmd_tune_gbm(gbm_opts, gbm_sim);
    if (*tune_jas_cmd) return cmd_tune_jasmine(jas_opts, jas_sim);
    if (*report) return cmd_report(runs_dir, reference, report_t);
    if (*synth) return cmd_synth(synth_rows, synth_features, synth_fraction, synth_seed, synth_out);
#ifdef JASMINE_WITH_SERVICE
    if (*serve) return cmd_serve(host, port);
#endif
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
