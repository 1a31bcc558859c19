#include "jasmine/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jasmine/random.hpp"
#include "text_util.hpp"

namespace jasmine {

std::string method_name(Method m) {
  switch (m) {
    case Method::kJasMain: return "jas.main";
    case Method::kJasBasic: return "jas.basic";
    case Method::kJasAnom: return "jas.anom";
    case Method::kJasUncert: return "jas.uncert";
    case Method::kJasRand: return "jas.rand";
    case Method::kAlaMain: return "ala.main";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::kJasMain, Method::kJasBasic, Method::kJasRand,
                                              Method::kJasAnom, Method::kJasUncert, Method::kAlaMain};
  return methods;
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  if (name == "ala.main-lite" || name == "ala.lite") return Method::kAlaMain;
  throw ConfigError("methods", "unknown method '" + std::string(name) + "'");
}

namespace {

std::string fmt(double v) { return detail::format_number(v); }

double to_double(std::string_view key, std::string_view value) {
  auto v = detail::parse_number(value);
  if (!v) throw ConfigError(std::string(key), "expected a number, got '" + std::string(value) + "'");
  return *v;
}

// Accepts plain numbers and simple fractions such as 1/800.
double to_real(std::string_view key, std::string_view value) {
  if (auto slash = value.find('/'); slash != std::string_view::npos) {
    const double num = to_double(key, value.substr(0, slash));
    const double den = to_double(key, value.substr(slash + 1));
    if (den == 0.0) throw ConfigError(std::string(key), "division by zero");
    return num / den;
  }
  return to_double(key, value);
}

long long to_int(std::string_view key, std::string_view value) {
  const double v = to_double(key, value);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(value) + "'");
  }
  return static_cast<long long>(v);
}

std::size_t to_count(std::string_view key, std::string_view value) {
  const long long v = to_int(key, value);
  if (v < 0) throw ConfigError(std::string(key), "must be non-negative");
  return static_cast<std::size_t>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
  const auto v = detail::lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key), "expected a boolean, got '" + std::string(value) + "'");
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const std::string k(key);
  value = detail::trim(value);
  if (k == "dataset") {
    static const std::vector<std::string> kinds = {"nslkdd", "nslkdd-rand", "unsw", "csv", "synthetic"};
    if (std::find(kinds.begin(), kinds.end(), value) == kinds.end()) {
      throw ConfigError(k, "unknown dataset kind '" + std::string(value) + "'");
    }
    dataset.kind = value;
  } else if (k == "train_path") {
    dataset.train_path = value;
  } else if (k == "test_path") {
    dataset.test_path = value;
  } else if (k == "data_path") {
    dataset.data_path = value;
  } else if (k == "manifest") {
    dataset.manifest = value;
  } else if (k == "synthetic.rows") {
    dataset.synthetic.rows = to_count(k, value);
  } else if (k == "synthetic.features") {
    dataset.synthetic.features = to_count(k, value);
  } else if (k == "synthetic.malicious_fraction") {
    dataset.synthetic.malicious_fraction = to_real(k, value);
  } else if (k == "synthetic.separation") {
    dataset.synthetic.separation = to_real(k, value);
  } else if (k == "synthetic.seed") {
    dataset.synthetic.seed = static_cast<std::uint64_t>(to_count(k, value));
  } else if (k == "L0") {
    initial_labeled = to_count(k, value);
  } else if (k == "E") {
    evaluation = to_count(k, value);
  } else if (k == "Q") {
    q = static_cast<int>(to_int(k, value));
  } else if (k == "N") {
    n = static_cast<int>(to_int(k, value));
  } else if (k == "S") {
    sims = static_cast<int>(to_int(k, value));
  } else if (k == "k") {
    folds = static_cast<int>(to_int(k, value));
  } else if (k == "seed") {
    seed = static_cast<std::uint64_t>(to_count(k, value));
  } else if (k == "out") {
    out = value;
  } else if (k == "methods") {
    methods.clear();
    for (auto item : detail::split(value, ',')) {
      auto name = detail::trim(item);
      if (!name.empty()) methods.push_back(parse_method(name));
    }
  } else if (k == "jasmine.alpha_a0") {
    jasmine.alpha_a0 = to_real(k, value);
  } else if (k == "jasmine.beta") {
    jasmine.beta = to_real(k, value);
  } else if (k == "jasmine.gamma") {
    jasmine.gamma = to_real(k, value);
  } else if (k == "jasmine.tau") {
    jasmine.tau = to_real(k, value);
  } else if (k == "jasmine.tune") {
    tune_jasmine = to_bool(k, value);
  } else if (k == "jasmine.tune_sims") {
    jasmine_tune_sims = static_cast<int>(to_int(k, value));
  } else if (k == "gbm.ntrees") {
    gbm.ntrees = static_cast<int>(to_int(k, value));
  } else if (k == "gbm.max_depth") {
    gbm.max_depth = static_cast<int>(to_int(k, value));
  } else if (k == "gbm.learn_rate") {
    gbm.learn_rate = to_real(k, value);
  } else if (k == "gbm.learn_rate_annealing") {
    gbm.learn_rate_annealing = to_real(k, value);
  } else if (k == "gbm.sample_rate") {
    gbm.sample_rate = to_real(k, value);
  } else if (k == "gbm.col_sample_rate") {
    gbm.col_sample_rate = to_real(k, value);
  } else if (k == "gbm.min_rows") {
    gbm.min_rows = static_cast<int>(to_int(k, value));
  } else if (k == "gbm.nbins") {
    gbm.nbins = static_cast<int>(to_int(k, value));
  } else if (k == "gbm.col_sample_rate_per_tree") {
    gbm.col_sample_rate_per_tree = to_real(k, value);
  } else if (k == "gbm.col_sample_rate_change_per_level") {
    gbm.col_sample_rate_change_per_level = to_real(k, value);
  } else if (k == "gbm.histogram_type" || k == "gbm.nbins_cats" || k == "gbm.distribution") {
    gbm.extra[k.substr(4)] = std::string(value);
  } else if (k == "gbm.tune") {
    tune_gbm = to_bool(k, value);
  } else if (k == "gbm.tune_seconds") {
    gbm_tune_seconds = to_real(k, value);
  } else if (k == "gbm.tune_max_combos") {
    gbm_tune_max_combos = static_cast<int>(to_int(k, value));
  } else if (k == "gbm.epsilon") {
    gbm_epsilon = to_real(k, value);
  } else if (k == "gbm.timing") {
    if (value == "wall") gbm_timing = TuneTiming::kWall;
    else if (value == "work") gbm_timing = TuneTiming::kWork;
    else throw ConfigError(k, "expected 'wall' or 'work'");
  } else if (k == "gbm.space") {
    if (value != "desk" && value != "paper") throw ConfigError(k, "expected 'desk' or 'paper'");
    gbm_space = value;
  } else if (k == "iforest.trees") {
    iforest.n_trees = static_cast<int>(to_int(k, value));
  } else if (k == "iforest.subsample") {
    iforest.subsample = static_cast<int>(to_int(k, value));
  } else if (k == "logreg.l2") {
    logreg.l2 = to_real(k, value);
  } else if (k == "logreg.iters") {
    logreg.iters = static_cast<int>(to_int(k, value));
  } else if (k == "logreg.step") {
    logreg.step = to_real(k, value);
  } else {
    throw ConfigError(k, "unknown configuration key");
  }
}

void ExperimentConfig::validate() const {
  if (q < 2) throw ConfigError("Q", "must be >= 2");
  if (n < q) throw ConfigError("N", "must be >= Q");
  if (sims < 1) throw ConfigError("S", "must be >= 1");
  if (folds < 2) throw ConfigError("k", "must be >= 2");
  if (initial_labeled < 2) throw ConfigError("L0", "must be >= 2");
  if (methods.empty()) throw ConfigError("methods", "no methods selected");
  if (jasmine_tune_sims < 1) throw ConfigError("jasmine.tune_sims", "must be >= 1");
  if (iforest.n_trees < 1) throw ConfigError("iforest.trees", "must be >= 1");
  if (iforest.subsample < 2) throw ConfigError("iforest.subsample", "must be >= 2");
  if (!(gbm_epsilon > 0.0)) throw ConfigError("gbm.epsilon", "must be positive");
  try {
    jasmine.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("jasmine", e.what());
  }
  try {
    gbm.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gbm", e.what());
  }
  const auto& d = dataset;
  if (d.kind == "nslkdd" || d.kind == "nslkdd-rand") {
    if (d.train_path.empty()) throw ConfigError("train_path", "required for " + d.kind);
    if (d.test_path.empty()) throw ConfigError("test_path", "required for " + d.kind);
  } else if (d.kind == "unsw" || d.kind == "csv") {
    if (d.data_path.empty()) throw ConfigError("data_path", "required for " + d.kind);
  } else if (d.kind == "synthetic") {
    if (d.synthetic.rows == 0) throw ConfigError("synthetic.rows", "must be positive");
    if (d.synthetic.features == 0) throw ConfigError("synthetic.features", "must be positive");
  }
}

void ExperimentConfig::apply(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> kv;
  try {
    kv = detail::parse_key_values(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", e.what());
  }
  for (const auto& [key, value] : kv) set(key, value);
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  cfg.apply(text);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream o;
  o << "dataset = " << dataset.kind << '\n';
  if (!dataset.train_path.empty()) o << "train_path = " << dataset.train_path.string() << '\n';
  if (!dataset.test_path.empty()) o << "test_path = " << dataset.test_path.string() << '\n';
  if (!dataset.data_path.empty()) o << "data_path = " << dataset.data_path.string() << '\n';
  if (!dataset.manifest.empty()) o << "manifest = " << dataset.manifest.string() << '\n';
  if (dataset.kind == "synthetic") {
    o << "synthetic.rows = " << dataset.synthetic.rows << '\n'
      << "synthetic.features = " << dataset.synthetic.features << '\n'
      << "synthetic.malicious_fraction = " << fmt(dataset.synthetic.malicious_fraction) << '\n'
      << "synthetic.separation = " << fmt(dataset.synthetic.separation) << '\n'
      << "synthetic.seed = " << dataset.synthetic.seed << '\n';
  }
  o << "L0 = " << initial_labeled << "\nE = " << evaluation << "\nQ = " << q << "\nN = " << n
    << "\nS = " << sims << "\nk = " << folds << "\nseed = " << seed << "\nout = " << out.string() << '\n';
  o << "methods = ";
  for (std::size_t i = 0; i < methods.size(); ++i) o << (i ? ", " : "") << method_name(methods[i]);
  o << '\n';
  o << "jasmine.alpha_a0 = " << fmt(jasmine.alpha_a0) << "\njasmine.beta = " << fmt(jasmine.beta)
    << "\njasmine.gamma = " << fmt(jasmine.gamma) << "\njasmine.tau = " << fmt(jasmine.tau)
    << "\njasmine.tune = " << (tune_jasmine ? "true" : "false") << "\njasmine.tune_sims = " << jasmine_tune_sims
    << '\n';
  o << "gbm.ntrees = " << gbm.ntrees << "\ngbm.max_depth = " << gbm.max_depth << "\ngbm.learn_rate = "
    << fmt(gbm.learn_rate) << "\ngbm.learn_rate_annealing = " << fmt(gbm.learn_rate_annealing)
    << "\ngbm.sample_rate = " << fmt(gbm.sample_rate) << "\ngbm.col_sample_rate = " << fmt(gbm.col_sample_rate)
    << "\ngbm.col_sample_rate_per_tree = " << fmt(gbm.col_sample_rate_per_tree)
    << "\ngbm.col_sample_rate_change_per_level = " << fmt(gbm.col_sample_rate_change_per_level)
    << "\ngbm.min_rows = " << gbm.min_rows << "\ngbm.nbins = " << gbm.nbins << '\n';
  for (const auto& [key, value] : gbm.extra) o << "gbm." << key << " = " << value << '\n';
  o << "gbm.tune = " << (tune_gbm ? "true" : "false") << "\ngbm.tune_seconds = " << fmt(gbm_tune_seconds)
    << "\ngbm.tune_max_combos = " << gbm_tune_max_combos << "\ngbm.epsilon = " << fmt(gbm_epsilon)
    << "\ngbm.timing = " << (gbm_timing == TuneTiming::kWall ? "wall" : "work") << "\ngbm.space = " << gbm_space
    << '\n';
  o << "iforest.trees = " << iforest.n_trees << "\niforest.subsample = " << iforest.subsample << '\n';
  o << "logreg.l2 = " << fmt(logreg.l2) << "\nlogreg.iters = " << logreg.iters << "\nlogreg.step = "
    << fmt(logreg.step) << '\n';
  return o.str();
}

std::uint64_t ExperimentConfig::hash() const { return stable_hash(serialize()); }

ExperimentConfig ExperimentConfig::preset(std::string_view scale) {
  ExperimentConfig c;
  if (scale == "smoke") {
    c.dataset.kind = "synthetic";
    c.dataset.synthetic = {1500, 6, 0.4, 3.0, 7};
    c.initial_labeled = 60;
    c.evaluation = 300;
    c.q = 20;
    c.n = 200;
    c.sims = 2;
    c.methods = {Method::kJasMain, Method::kJasRand};
    c.gbm.ntrees = 20;
    c.gbm.max_depth = 4;
    c.gbm.min_rows = 5;
    c.iforest.n_trees = 50;
    c.out = "runs/smoke";
  } else if (scale == "desk") {
    c.dataset.kind = "nslkdd";
    c.initial_labeled = 125;
    c.evaluation = 22544;
    c.q = 40;
    c.n = 2000;
    c.sims = 5;
    c.methods = {Method::kJasMain, Method::kJasRand};
    c.tune_gbm = true;
    c.gbm_space = "desk";
    c.gbm_timing = TuneTiming::kWork;
    c.gbm_tune_max_combos = 20;
    c.gbm_tune_seconds = 600.0;
    c.out = "runs/desk";
  } else if (scale == "paper") {
    c.dataset.kind = "nslkdd";
    c.initial_labeled = 125;
    c.evaluation = 22544;
    c.q = 40;
    c.n = 15000;
    c.sims = 30;
    c.methods = all_methods();
    c.tune_gbm = true;
    c.tune_jasmine = true;
    c.gbm_space = "paper";
    c.gbm_timing = TuneTiming::kWall;
    c.gbm_tune_seconds = 4.0 * 3600.0;
    c.gbm_tune_max_combos = 1000000;
    c.out = "runs/paper";
  } else {
    throw ConfigError("scale", "unknown preset '" + std::string(scale) + "' (smoke, desk, paper)");
  }
  return c;
}

LoadedData load_dataset(const DatasetConfig& config) {
  LoadedData out;
  if (config.kind == "nslkdd" || config.kind == "nslkdd-rand") {
    auto pair = load_nslkdd(config.train_path, config.test_path);
    const std::size_t train_rows = pair.train.size();
    const std::size_t test_rows = pair.test.size();
    out.data = build_nslkdd_rand(pair.train, pair.test);
    if (config.kind == "nslkdd") {
      out.data.name = "nslkdd";
      IndexList eval(test_rows);
      for (std::size_t i = 0; i < test_rows; ++i) eval[i] = train_rows + i;
      out.fixed_eval = std::move(eval);
    }
  } else if (config.kind == "unsw") {
    if (std::filesystem::is_directory(config.data_path)) {
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(config.data_path)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw DataError("no .csv files in " + config.data_path.string());
      out.data = load_unsw(files.front());
      for (std::size_t i = 1; i < files.size(); ++i) out.data = build_nslkdd_rand(out.data, load_unsw(files[i]));
      out.data.name = "unsw";
    } else {
      out.data = load_unsw(config.data_path);
    }
  } else if (config.kind == "csv") {
    auto manifest = config.manifest.empty() ? DatasetManifest::synthetic() : DatasetManifest::load(config.manifest);
    out.data = load_csv(config.data_path, manifest);
  } else if (config.kind == "synthetic") {
    out.data = make_synthetic(config.synthetic);
  } else {
    throw ConfigError("dataset", "unknown dataset kind '" + config.kind + "'");
  }
  return out;
}

DatasetConfig resolve_data_paths(DatasetConfig config, const std::filesystem::path& data_dir) {
  namespace fs = std::filesystem;
  auto first_existing = [&](std::initializer_list<const char*> names) -> fs::path {
    for (const char* name : names) {
      if (fs::exists(data_dir / name)) return data_dir / name;
    }
    return {};
  };
  if (config.kind == "nslkdd" || config.kind == "nslkdd-rand") {
    if (config.train_path.empty()) config.train_path = first_existing({"KDDTrain+.txt", "KDDTrain+.csv", "NSL-KDD/KDDTrain+.txt"});
    if (config.test_path.empty()) config.test_path = first_existing({"KDDTest+.txt", "KDDTest+.csv", "NSL-KDD/KDDTest+.txt"});
  } else if (config.kind == "unsw" && config.data_path.empty()) {
    config.data_path = first_existing({"UNSW-NB15.csv", "UNSW-NB15"});
  }
  return config;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("JASMINE_DATA_DIR"); env && *env) return env;
  return "data";
}

}  // namespace jasmine
