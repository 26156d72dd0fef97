#include "mrgrade/tables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrgrade/image.hpp"

namespace mrgrade {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "id,label,path") {
    throw ParseError(path.string() + ": expected header 'id,label,path'");
  }
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3 || fields[0].empty() || fields[2].empty()) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected id,label,path");
    }
    std::filesystem::path p = fields[2];
    if (p.is_relative()) p = base / p;
    entries.push_back({fields[0], fields[1], p});
  }
  return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id,label,path\n";
  for (const auto& e : entries) out << e.id << ',' << e.label << ',' << e.path.generic_string() << "\n";
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_feature_csv(const std::vector<FeatureVector>& rows, const std::vector<std::string>& names,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id,label";
  for (const auto& n : names) out << ',' << n;
  out << "\n";
  for (const auto& row : rows) {
    if (row.values.size() != static_cast<Eigen::Index>(names.size())) {
      throw InvalidInput("feature csv: row " + row.image_id + " has wrong length");
    }
    out << row.image_id << ',' << row.label.value_or("");
    for (Eigen::Index j = 0; j < row.values.size(); ++j) out << ',' << format_value(row.values(j));
    out << "\n";
  }
}

LabeledTable read_labeled_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const auto header = split_csv(strip_cr(line));
  if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
    throw ParseError(path.string() + ": expected header 'id,label,...'");
  }
  LabeledTable table;
  table.columns.assign(header.begin() + 2, header.end());
  const std::size_t m = table.columns.size();
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != m + 2) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(m + 2) + " fields");
    }
    table.ids.push_back(fields[0]);
    table.labels.push_back(fields[1]);
    std::vector<double> values(m);
    for (std::size_t j = 0; j < m; ++j) {
      try {
        std::size_t used = 0;
        values[j] = std::stod(fields[j + 2], &used);
        if (used != fields[j + 2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                         fields[j + 2] + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) table.values(i, j) = rows[i][j];
  }
  return table;
}

void write_labeled_csv(const LabeledTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "id,label";
  for (const auto& c : table.columns) out << ',' << c;
  out << "\n";
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    out << table.ids[i] << ',' << table.labels[i];
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) out << ',' << format_value(table.values(i, j));
    out << "\n";
  }
}

}  // namespace mrgrade
