#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "jasmine/dataset.hpp"

namespace testing {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("jasmine-test-" + name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline jasmine::Dataset small_synthetic(std::size_t rows = 600, std::uint64_t seed = 3, std::size_t features = 5) {
  jasmine::SyntheticSpec spec;
  spec.rows = rows;
  spec.features = features;
  spec.malicious_fraction = 0.4;
  spec.separation = 3.0;
  spec.seed = seed;
  return jasmine::make_synthetic(spec);
}

inline std::filesystem::path source_dir() { return JASMINE_SOURCE_DIR; }

// CSV text with one named column emptied; wall-clock columns differ across runs.
inline std::string drop_column(const std::string& csv, const std::string& column) {
  std::istringstream in(csv);
  std::string line, out;
  long target = -1;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == column) target = static_cast<long>(i);
      }
      header = false;
    } else if (target >= 0 && static_cast<std::size_t>(target) < cells.size()) {
      cells[static_cast<std::size_t>(target)].clear();
    }
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += '\n';
  }
  return out;
}

}  // namespace testing

#include "jasmine/config.hpp"

namespace testing {

/// Seconds-scale experiment on synthetic data.
inline jasmine::ExperimentConfig tiny_config(const std::filesystem::path& out = "runs/test") {
  auto c = jasmine::ExperimentConfig::preset("smoke");
  c.dataset.synthetic.rows = 500;
  c.initial_labeled = 40;
  c.evaluation = 120;
  c.q = 10;
  c.n = 40;
  c.sims = 2;
  c.folds = 3;
  c.gbm.ntrees = 8;
  c.gbm.max_depth = 3;
  c.iforest = {30, 64};
  c.out = out;
  return c;
}

}  // namespace testing
