#include "mrgrade/ca.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrgrade/image.hpp"

namespace mrgrade {

namespace {

constexpr double kRelativeRankCutoff = 1e-12;
constexpr double kAbsoluteRankCutoff = 1e-14;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_table(const Eigen::MatrixXd& x) {
  if (x.rows() < 2 || x.cols() < 2) throw InvalidInput("ca: table must be at least 2 x 2");
  if (!x.allFinite()) throw InvalidInput("ca: table has non-finite entries");
  if ((x.array() < 0.0).any()) throw InvalidInput("ca: table has negative entries");
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (x.row(i).sum() <= 0.0) throw InvalidInput("ca: row " + std::to_string(i) + " sums to zero");
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).sum() <= 0.0) throw InvalidInput("ca: column " + std::to_string(j) + " sums to zero");
  }
}

}  // namespace

NonnegResult nonneg_prepare(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw InvalidInput("nonneg_prepare: table has non-finite entries");
  NonnegResult out;
  out.clipped = static_cast<int>((x.array() < 0.0).count());
  out.table = x.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < out.table.rows(); ++i) {
    if (out.table.row(i).sum() <= 0.0) {
      throw InvalidInput("nonneg_prepare: row " + std::to_string(i) + " is zero after clipping");
    }
  }
  for (Eigen::Index j = 0; j < out.table.cols(); ++j) {
    if (out.table.col(j).sum() <= 0.0) {
      throw InvalidInput("nonneg_prepare: column " + std::to_string(j) + " is zero after clipping");
    }
  }
  return out;
}

std::vector<int> zero_columns_after_clipping(const Eigen::MatrixXd& x) {
  std::vector<int> cols;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).cwiseMax(0.0).sum() <= 0.0) cols.push_back(static_cast<int>(j));
  }
  return cols;
}

FactorModel ca_fit(const Eigen::MatrixXd& x) {
  check_table(x);
  FactorModel model;
  model.grand_total = x.sum();
  const Eigen::MatrixXd p = x / model.grand_total;
  model.row_masses = p.rowwise().sum();
  model.col_masses = p.colwise().sum().transpose();

  const Eigen::VectorXd rsqrt = model.row_masses.cwiseSqrt();
  const Eigen::VectorXd csqrt = model.col_masses.cwiseSqrt();
  const Eigen::MatrixXd expected = model.row_masses * model.col_masses.transpose();
  const Eigen::MatrixXd residuals =
      rsqrt.cwiseInverse().asDiagonal() * (p - expected) * csqrt.cwiseInverse().asDiagonal();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(residuals, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("ca: singular value decomposition failed");
  const Eigen::VectorXd& sigma = svd.singularValues();

  const Eigen::Index limit = std::min(x.rows() - 1, x.cols() - 1);
  Eigen::Index k = 0;
  const double cutoff = sigma.size() > 0 ? std::max(kRelativeRankCutoff * sigma(0), kAbsoluteRankCutoff)
                                         : kAbsoluteRankCutoff;
  while (k < limit && k < sigma.size() && sigma(k) >= cutoff) ++k;

  model.singular_values = sigma.head(k);
  const Eigen::MatrixXd u = svd.matrixU().leftCols(k);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(k);
  model.row_coords = rsqrt.cwiseInverse().asDiagonal() * u * model.singular_values.asDiagonal();
  model.col_coords = csqrt.cwiseInverse().asDiagonal() * v * model.singular_values.asDiagonal();
  const double total = model.singular_values.squaredNorm();
  model.inertia_shares = total > 0.0 ? Eigen::VectorXd(model.singular_values.array().square() / total)
                                     : Eigen::VectorXd();
  return model;
}

std::vector<Contribution> contributions(const FactorModel& model, int k, ContributionScale scale) {
  if (k < 1 || k > model.factors()) {
    throw InvalidInput("contributions: factor " + std::to_string(k) + " out of range 1.." +
                       std::to_string(model.factors()));
  }
  const double sigma2 = model.singular_values(k - 1) * model.singular_values(k - 1);
  std::vector<Contribution> out;
  out.reserve(model.col_masses.size());
  for (Eigen::Index j = 0; j < model.col_masses.size(); ++j) {
    const double g = model.col_coords(j, k - 1);
    double value = model.col_masses(j) * g * g;
    if (scale == ContributionScale::Normalized) value /= sigma2;
    out.push_back({static_cast<int>(j), k, value});
  }
  return out;
}

Eigen::VectorXd project_supplementary(const FactorModel& model, const Eigen::VectorXd& row) {
  if (row.size() != model.col_masses.size()) {
    throw InvalidInput("project_supplementary: row has " + std::to_string(row.size()) +
                       " entries, model has " + std::to_string(model.col_masses.size()) + " columns");
  }
  if (!row.allFinite() || (row.array() < 0.0).any()) {
    throw InvalidInput("project_supplementary: row must be finite and nonnegative");
  }
  const double total = row.sum();
  if (!(total > 0.0)) throw InvalidInput("project_supplementary: row sums to zero");
  const Eigen::RowVectorXd profile = row.transpose() / total;
  return (profile * model.col_coords).transpose().cwiseQuotient(model.singular_values);
}

double chi2_inertia(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd p = x / x.sum();
  const Eigen::VectorXd r = p.rowwise().sum();
  const Eigen::VectorXd c = p.colwise().sum().transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double e = r(i) * c(j);
      total += (p(i, j) - e) * (p(i, j) - e) / e;
    }
  }
  return total;
}

double chi2_row_distance(const Eigen::MatrixXd& x, int a, int b) {
  const Eigen::MatrixXd p = x / x.sum();
  const Eigen::VectorXd c = p.colwise().sum().transpose();
  const double fa = p.row(a).sum();
  const double fb = p.row(b).sum();
  double d = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double diff = p(a, j) / fa - p(b, j) / fb;
    d += diff * diff / c(j);
  }
  return d;
}

void save_model(const FactorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const Eigen::Index m = model.col_masses.size();
  const int k = model.factors();
  out << "# correspondence-analysis model\n";
  out << "columns " << m << "\n";
  out << "factors " << k << "\n";
  out << "grand_total " << fmt17(model.grand_total) << "\n";
  out << "[column_names]\n";
  for (Eigen::Index j = 0; j < m; ++j) {
    out << (static_cast<std::size_t>(j) < model.column_names.size() ? model.column_names[j]
                                                                    : "col" + std::to_string(j + 1))
        << "\n";
  }
  out << "[col_masses]\n";
  for (Eigen::Index j = 0; j < m; ++j) out << fmt17(model.col_masses(j)) << "\n";
  out << "[singular_values]\n";
  for (int i = 0; i < k; ++i) out << fmt17(model.singular_values(i)) << "\n";
  out << "[col_coords]\n";
  for (Eigen::Index j = 0; j < m; ++j) {
    for (int i = 0; i < k; ++i) out << (i ? " " : "") << fmt17(model.col_coords(j, i));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

FactorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model " + path.string());
  auto fail = [&](const std::string& why) { throw ParseError(path.string() + ": " + why); };

  std::string line;
  long m = -1;
  long k = -1;
  FactorModel model;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  auto header = [&](const char* key) {
    if (!next_line()) fail(std::string("missing ") + key);
    std::istringstream ss(line);
    std::string name;
    double value = 0;
    if (!(ss >> name >> value) || name != key) fail(std::string("expected ") + key);
    return value;
  };
  auto section = [&](const char* name) {
    if (!next_line() || line != name) fail(std::string("expected section ") + name);
  };
  auto read_values = [&](Eigen::Index count) {
    Eigen::VectorXd v(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      if (!next_line()) fail("truncated section");
      try {
        v(i) = std::stod(line);
      } catch (const std::exception&) {
        fail("bad number '" + line + "'");
      }
    }
    return v;
  };

  m = static_cast<long>(header("columns"));
  k = static_cast<long>(header("factors"));
  model.grand_total = header("grand_total");
  if (m < 1 || k < 0 || k > m) fail("bad dimensions");
  section("[column_names]");
  for (long j = 0; j < m; ++j) {
    if (!next_line()) fail("truncated column names");
    model.column_names.push_back(line);
  }
  section("[col_masses]");
  model.col_masses = read_values(m);
  section("[singular_values]");
  model.singular_values = read_values(k);
  section("[col_coords]");
  model.col_coords.resize(m, k);
  for (long j = 0; j < m; ++j) {
    if (!next_line()) fail("truncated column coordinates");
    std::istringstream ss(line);
    for (long i = 0; i < k; ++i) {
      if (!(ss >> model.col_coords(j, i))) fail("bad coordinate row " + std::to_string(j + 1));
    }
  }
  const double total = model.singular_values.squaredNorm();
  if (total > 0.0) model.inertia_shares = model.singular_values.array().square() / total;
  return model;
}

}  // namespace mrgrade
