#include "jasmine/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "jasmine/random.hpp"
#include "text_util.hpp"

namespace jasmine {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw DataError("feature matrix: size mismatch");
}

double Dataset::malicious_fraction() const {
  if (labels.empty()) return 0.0;
  std::size_t pos = std::count(labels.begin(), labels.end(), Label{1});
  return static_cast<double>(pos) / static_cast<double>(labels.size());
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  std::vector<double> values;
  values.reserve(indices.size() * width());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = features.row(i);
    values.insert(values.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  out.features = FeatureMatrix(indices.size(), width(), std::move(values));
  return out;
}

void Dataset::validate() const {
  if (features.rows() == 0 || features.cols() == 0) throw DataError(name + ": empty dataset");
  if (features.rows() != labels.size()) throw DataError(name + ": label count mismatch");
  if (feature_names.size() != features.cols()) throw DataError(name + ": feature name mismatch");
  for (std::size_t i = 0; i < features.rows(); ++i) {
    if (labels[i] > 1) throw DataError(name + ": non-binary label at row " + std::to_string(i));
    for (double v : features.row(i)) {
      if (!std::isfinite(v)) throw DataError(name + ": non-finite value at row " + std::to_string(i));
    }
  }
}

namespace {

std::string_view unquote(std::string_view s) {
  s = detail::trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return detail::trim(s);
}

bool is_header(const std::vector<std::string_view>& fields) {
  return std::none_of(fields.begin(), fields.end(),
                      [](std::string_view f) { return detail::parse_number(unquote(f)).has_value(); });
}

}  // namespace

Dataset parse_csv(std::string_view text, const DatasetManifest& manifest, std::string name) {
  std::vector<std::string_view> lines;
  for (auto line : detail::split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!detail::trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw DataError(name + ": no rows");

  std::vector<std::string> columns;
  std::size_t first_data = 0;
  auto first_fields = detail::split(lines.front(), ',');
  if (is_header(first_fields)) {
    for (auto f : first_fields) columns.emplace_back(unquote(f));
    first_data = 1;
  } else {
    columns = manifest.columns;
    if (columns.empty()) throw DataError(name + ": no header row and manifest has no positional schema");
  }

  std::vector<std::string> lowered;
  for (const auto& c : columns) lowered.push_back(detail::lower(c));

  std::optional<std::size_t> label_col;
  for (const auto& candidate : manifest.label_columns) {
    auto it = std::find(lowered.begin(), lowered.end(), detail::lower(candidate));
    if (it != lowered.end()) {
      label_col = static_cast<std::size_t>(it - lowered.begin());
      break;
    }
  }
  if (!label_col) throw DataError(name + ": schema error: label column not found");

  std::unordered_set<std::string> dropped;
  for (const auto& d : manifest.drop) dropped.insert(detail::lower(d));
  std::unordered_set<std::string> negatives;
  for (const auto& n : manifest.negative_labels) negatives.insert(detail::lower(n));

  std::vector<std::size_t> kept;
  Dataset out;
  out.name = std::move(name);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c == *label_col || dropped.contains(lowered[c])) continue;
    kept.push_back(c);
    out.feature_names.push_back(columns[c]);
  }
  if (kept.empty()) throw DataError(out.name + ": no feature columns left after dropping");

  const std::size_t rows = lines.size() - first_data;
  std::vector<double> values;
  values.reserve(rows * kept.size());
  out.labels.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto fields = detail::split(lines[first_data + r], ',');
    if (fields.size() != columns.size()) {
      throw DataError(out.name + ": row " + std::to_string(r) + ": expected " +
                      std::to_string(columns.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c : kept) {
      auto cell = unquote(fields[c]);
      if (cell.empty()) {
        values.push_back(manifest.missing_value);
        continue;
      }
      auto v = detail::parse_number(cell);
      if (!v) {
        throw DataError(out.name + ": row " + std::to_string(r) + ": unparseable value '" +
                        std::string(cell) + "' in column " + columns[c]);
      }
      values.push_back(std::isfinite(*v) ? *v : manifest.missing_value);
    }
    auto cell = unquote(fields[*label_col]);
    if (cell.empty()) throw DataError(out.name + ": row " + std::to_string(r) + ": empty label");
    if (manifest.label_encoding == LabelEncoding::kNegativeStrings) {
      out.labels.push_back(negatives.contains(detail::lower(cell)) ? 0 : 1);
    } else {
      auto v = detail::parse_number(cell);
      if (!v || (*v != 0.0 && *v != 1.0)) {
        throw DataError(out.name + ": row " + std::to_string(r) + ": label '" + std::string(cell) +
                        "' is not 0/1");
      }
      out.labels.push_back(static_cast<Label>(*v));
    }
  }
  out.features = FeatureMatrix(rows, kept.size(), std::move(values));
  out.validate();
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), manifest, manifest.name + ":" + path.filename().string());
}

NslKddPair load_nslkdd(const std::filesystem::path& train_path,
                       const std::filesystem::path& test_path) {
  auto manifest = DatasetManifest::nslkdd();
  return {load_csv(train_path, manifest), load_csv(test_path, manifest)};
}

Dataset load_unsw(const std::filesystem::path& path) {
  return load_csv(path, DatasetManifest::unsw());
}

Dataset build_nslkdd_rand(const Dataset& train, const Dataset& test) {
  if (train.width() != test.width() || train.feature_names != test.feature_names) {
    throw DataError("nslkdd-rand: train/test schema mismatch");
  }
  Dataset out;
  out.name = "nslkdd-rand";
  out.feature_names = train.feature_names;
  std::vector<double> values(train.features.values().begin(), train.features.values().end());
  values.insert(values.end(), test.features.values().begin(), test.features.values().end());
  out.features = FeatureMatrix(train.size() + test.size(), train.width(), std::move(values));
  out.labels = train.labels;
  out.labels.insert(out.labels.end(), test.labels.begin(), test.labels.end());
  return out;
}

PoolPartition partition(std::size_t rows, std::size_t initial_labeled, std::size_t evaluation,
                        const std::optional<IndexList>& fixed_eval, std::uint64_t seed) {
  PoolPartition p;
  p.seed = seed;
  std::vector<char> taken(rows, 0);
  std::size_t available = rows;
  if (fixed_eval) {
    p.evaluation = *fixed_eval;
    for (std::size_t i : p.evaluation) {
      if (i >= rows) throw DataError("partition: evaluation index out of range");
      if (taken[i]) throw DataError("partition: duplicate evaluation index");
      taken[i] = 1;
    }
    available -= p.evaluation.size();
    evaluation = 0;
  }
  if (initial_labeled + evaluation > available) {
    throw DataError("partition: insufficient rows (" + std::to_string(available) + " available, " +
                    std::to_string(initial_labeled + evaluation) + " requested)");
  }
  IndexList pool;
  pool.reserve(available);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!taken[i]) pool.push_back(i);
  }
  Engine rng = SeedPath(seed).with("partition").engine();
  auto picks = sample_without_replacement(rng, pool.size(), initial_labeled + evaluation);
  for (std::size_t k = 0; k < picks.size(); ++k) {
    std::size_t idx = pool[picks[k]];
    taken[idx] = 1;
    (k < initial_labeled ? p.labeled : p.evaluation).push_back(idx);
  }
  for (std::size_t i : pool) {
    if (!taken[i]) p.unlabeled.push_back(i);
  }
  return p;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& n : data.feature_names) out << n << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.write(buf, end - buf);
      out << ',';
    }
    out << static_cast<int>(data.labels[i]) << '\n';
  }
}

}  // namespace jasmine
