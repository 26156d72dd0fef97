#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mrgrade {

/// Correspondence-analysis factors of a nonnegative n x m table.
///
/// Only factors with nonzero singular value are kept (the trivial
/// independence factor never appears), so K <= min(n - 1, m - 1).
struct FactorModel {
  Eigen::VectorXd row_masses;       // f_i, sums to 1
  Eigen::VectorXd col_masses;       // f_j, sums to 1
  Eigen::VectorXd singular_values;  // descending, length K
  Eigen::MatrixXd row_coords;       // n x K, F_ik = sigma_k u_ik / sqrt(f_i)
  Eigen::MatrixXd col_coords;       // m x K, G_jk = sigma_k v_jk / sqrt(f_j)
  Eigen::VectorXd inertia_shares;   // sigma_k^2 / sum sigma^2
  double grand_total = 0.0;
  std::vector<std::string> column_names;  // optional

  int factors() const { return static_cast<int>(singular_values.size()); }
  double total_inertia() const { return singular_values.squaredNorm(); }
};

struct NonnegResult {
  Eigen::MatrixXd table;
  int clipped = 0;  // number of negative entries set to zero
};

/// Sets negative entries to zero. Throws InvalidInput if the table has a
/// non-finite entry or a row/column that sums to zero afterwards.
NonnegResult nonneg_prepare(const Eigen::MatrixXd& x);

/// Indices of columns that are entirely zero after clipping negatives.
std::vector<int> zero_columns_after_clipping(const Eigen::MatrixXd& x);

/// Fits the factor model. Requires n, m >= 2, nonnegative entries and no zero
/// row or column. Singular values below 1e-12 * sigma_1 (or 1e-14 absolute)
/// are treated as zero.
FactorModel ca_fit(const Eigen::MatrixXd& x);

enum class ContributionScale {
  Normalized,  // f_j G_jk^2 / sigma_k^2, sums to 1 over j
  Raw,         // f_j G_jk^2, sums to sigma_k^2
};

struct Contribution {
  int feature = 0;  // 0-based column
  int factor = 0;   // 1-based
  double value = 0.0;
};

/// Column contributions to factor `k` (1-based), one per column.
std::vector<Contribution> contributions(const FactorModel& model, int k,
                                        ContributionScale scale = ContributionScale::Normalized);

/// Projects a supplementary row (nonnegative, positive sum) onto the factors
/// through its profile: F_k = (1/sigma_k) sum_j profile_j G_jk.
Eigen::VectorXd project_supplementary(const FactorModel& model, const Eigen::VectorXd& row);

/// Direct chi-squared total inertia sum (p_ij - f_i f_j)^2 / (f_i f_j).
double chi2_inertia(const Eigen::MatrixXd& x);

/// Chi-squared distance between the profiles of rows a and b of x.
double chi2_row_distance(const Eigen::MatrixXd& x, int a, int b);

/// Plain-text model file with 17-significant-digit values; holds what
/// project_supplementary needs (column masses, singular values, column
/// coordinates, column names). Row data are not stored.
void save_model(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_model(const std::filesystem::path& path);

}  // namespace mrgrade
