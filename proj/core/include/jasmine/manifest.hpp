#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace jasmine {

/// How a label cell is turned into {0,1}.
enum class LabelEncoding {
  kNegativeStrings,  ///< listed strings map to 0, anything else to 1
  kBinary,           ///< the cell holds 0 or 1
};

/// Per-dataset loading rules. Column matching is by case-insensitive name.
struct DatasetManifest {
  std::string name;
  int version = 1;
  std::vector<std::string> columns;      ///< positional schema for headerless files
  std::vector<std::string> label_columns;  ///< first present one is used
  LabelEncoding label_encoding = LabelEncoding::kBinary;
  std::vector<std::string> negative_labels;
  std::vector<std::string> drop;         ///< absent names are ignored
  double missing_value = 0.0;

  static DatasetManifest parse(std::string_view text);
  static DatasetManifest load(const std::filesystem::path& path);

  static DatasetManifest nslkdd();
  static DatasetManifest unsw();
  static DatasetManifest synthetic();
};

}  // namespace jasmine
