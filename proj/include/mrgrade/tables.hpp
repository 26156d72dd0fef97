#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrgrade/features.hpp"
#include "mrgrade/knn.hpp"

namespace mrgrade {

struct ManifestEntry {
  std::string id;
  std::string label;  // empty when unknown
  std::filesystem::path path;
};

/// Reads `id,label,path`; relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);

/// "%.17g" formatting used by every numeric CSV.
std::string format_value(double v);

/// `id,label,<names...>` with one row per vector.
void write_feature_csv(const std::vector<FeatureVector>& rows, const std::vector<std::string>& names,
                       const std::filesystem::path& path);

/// Any `id,label,v1,...` table (feature or factor CSV).
struct LabeledTable {
  std::vector<std::string> columns;  // value column names
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  Eigen::MatrixXd values;

  LabeledPoints points() const { return {ids, labels, values}; }
};

LabeledTable read_labeled_csv(const std::filesystem::path& path);
void write_labeled_csv(const LabeledTable& table, const std::filesystem::path& path);

}  // namespace mrgrade
