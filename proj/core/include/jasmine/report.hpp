#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jasmine/stats.hpp"

namespace jasmine {

/// learning_curves.csv: sim,method,t,labeled,f1
std::string learning_curve_header();
std::string learning_curve_row(int sim, const std::string& method, const CurvePoint& point);
std::vector<LearningCurve> parse_learning_curves(std::string_view text);
std::vector<LearningCurve> read_learning_curves(const std::filesystem::path& path);

struct AreaRow {
  int sim = 0;
  std::string method;
  int t_ref = 0;
  std::size_t labeled = 0;
  double area = 0.0;
};

/// One comparison of the reference method against another at one t_ref.
/// `greater` tests reference > other, `less` the reverse; either is absent
/// when the test is undefined (fewer than five nonzero paired differences).
struct WilcoxonRow {
  int t_ref = 0;
  std::size_t labeled = 0;
  std::string reference;
  std::string other;
  std::size_t pairs = 0;
  std::optional<WilcoxonResult> greater;
  std::optional<WilcoxonResult> less;
};

struct Statistics {
  std::vector<AreaRow> areas;
  std::vector<WilcoxonRow> tests;
};

/// Areas A(t_ref) per curve and paired one-sided tests of `reference`
/// against every other method, pairing by sim. Curves shorter than t_ref
/// are skipped at that t_ref.
Statistics compute_statistics(const std::vector<LearningCurve>& curves, const std::vector<int>& tref_grid,
                              const std::string& reference = "jas.main");

std::string areas_csv(const Statistics& stats);
std::string wilcoxon_csv(const Statistics& stats);

/// Mean metric per (method, t) over sims.
std::string mean_curve_csv(const std::vector<LearningCurve>& curves);

/// Write areas.csv, wilcoxon.csv and mean_curves.csv into `dir`.
void write_statistics(const std::vector<LearningCurve>& curves, const std::vector<int>& tref_grid,
                      const std::filesystem::path& dir, const std::string& reference = "jas.main");

}  // namespace jasmine
