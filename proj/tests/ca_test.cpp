#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "mrgrade/ca.hpp"
#include "mrgrade/image.hpp"
#include "test_support.hpp"

namespace mrgrade {
namespace {

Eigen::MatrixXd positive_table(int rows, int cols, std::uint64_t seed) {
  const auto a = testing::random_array(rows, cols, seed, 0.1, 10.0);
  return Eigen::MatrixXd(a.matrix());
}

// Direct chi-squared statistic over the grand total.
double direct_inertia(const Eigen::MatrixXd& x) {
  const double n = x.sum();
  double chi2 = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double e = x.row(i).sum() * x.col(j).sum() / n;
      chi2 += (x(i, j) - e) * (x(i, j) - e) / e;
    }
  }
  return chi2 / n;
}

double direct_row_distance(const Eigen::MatrixXd& x, int a, int b) {
  const double n = x.sum();
  double d = 0.0;
  for (int j = 0; j < x.cols(); ++j) {
    const double diff = x(a, j) / x.row(a).sum() - x(b, j) / x.row(b).sum();
    d += diff * diff / (x.col(j).sum() / n);
  }
  return d;
}

TEST(Ca, IdentityTable) {
  const auto m = ca_fit(Eigen::MatrixXd::Identity(2, 2));
  ASSERT_EQ(m.factors(), 1);
  EXPECT_NEAR(m.singular_values(0), 1.0, 1e-12);
  EXPECT_NEAR(m.inertia_shares(0), 1.0, 1e-12);
  const auto c = contributions(m, 1);
  EXPECT_NEAR(c[0].value, 0.5, 1e-12);
  EXPECT_NEAR(c[1].value, 0.5, 1e-12);
  EXPECT_NEAR(m.row_masses(0), 0.5, 1e-15);
}

TEST(Ca, RankOneTableHasNoInertia) {
  Eigen::VectorXd r(4);
  r << 1, 2, 3, 4;
  Eigen::VectorXd c(3);
  c << 5, 1, 2;
  const auto m = ca_fit(r * c.transpose());
  EXPECT_EQ(m.factors(), 0);
  EXPECT_NEAR(m.total_inertia(), 0.0, 1e-20);
  EXPECT_NEAR(chi2_inertia(r * c.transpose()), 0.0, 1e-14);
}

TEST(Ca, InertiaMatchesChiSquared) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = positive_table(10, 15, seed);
    const auto m = ca_fit(x);
    const double oracle = direct_inertia(x);
    EXPECT_NEAR(m.total_inertia(), oracle, 1e-10) << seed;
    EXPECT_NEAR(chi2_inertia(x), oracle, 1e-12) << seed;
    EXPECT_LE(m.factors(), 9);
    EXPECT_NEAR(m.inertia_shares.sum(), 1.0, 1e-12);
    for (int k = 1; k < m.factors(); ++k) EXPECT_GE(m.singular_values(k - 1), m.singular_values(k));
  }
}

TEST(Ca, RowDistancesMatchChiSquared) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = positive_table(10, 15, 100 + seed);
    const auto m = ca_fit(x);
    for (int a = 0; a < 10; ++a) {
      for (int b = a + 1; b < 10; ++b) {
        const double oracle = direct_row_distance(x, a, b);
        EXPECT_NEAR((m.row_coords.row(a) - m.row_coords.row(b)).squaredNorm(), oracle, 1e-8);
        EXPECT_NEAR(chi2_row_distance(x, a, b), oracle, 1e-12);
      }
    }
  }
}

TEST(Ca, ContributionsSumPerFactor) {
  const auto x = positive_table(12, 8, 7);
  const auto m = ca_fit(x);
  for (int k = 1; k <= m.factors(); ++k) {
    double normalized = 0.0;
    for (const auto& c : contributions(m, k)) {
      EXPECT_EQ(c.factor, k);
      EXPECT_GE(c.value, 0.0);
      normalized += c.value;
    }
    double raw = 0.0;
    for (const auto& c : contributions(m, k, ContributionScale::Raw)) raw += c.value;
    EXPECT_NEAR(normalized, 1.0, 1e-10);
    EXPECT_NEAR(raw, m.singular_values(k - 1) * m.singular_values(k - 1), 1e-12);
  }
  EXPECT_THROW(contributions(m, 0), InvalidInput);
  EXPECT_THROW(contributions(m, m.factors() + 1), InvalidInput);
}

TEST(Ca, RowProfileInvariance) {
  const auto x = positive_table(10, 15, 21);
  const auto m = ca_fit(x);
  // A scaled duplicate shares the profile, hence the coordinates.
  Eigen::MatrixXd y(11, 15);
  y.topRows(10) = x;
  y.row(10) = 10.0 * x.row(3);
  const auto d = ca_fit(y);
  EXPECT_LT((d.row_coords.row(10) - d.row_coords.row(3)).cwiseAbs().maxCoeff(), 1e-8);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd scaled = 10.0 * x.row(i).transpose();
    EXPECT_LT((project_supplementary(m, scaled) - m.row_coords.row(i).transpose()).cwiseAbs().maxCoeff(), 1e-8);
  }
  // Refitting with a scaled row changes the masses, so only profile distances are preserved.
  Eigen::MatrixXd z = x;
  z.row(3) *= 10.0;
  const auto r = ca_fit(z);
  for (int j = 0; j < 10; ++j) {
    EXPECT_NEAR((r.row_coords.row(3) - r.row_coords.row(j)).squaredNorm(), direct_row_distance(z, 3, j), 1e-8);
  }
}

TEST(Ca, CoordinatesAreCentredAndBarycentric) {
  const auto x = positive_table(9, 11, 31);
  const auto m = ca_fit(x);
  const Eigen::VectorXd row_centre = m.row_coords.transpose() * m.row_masses;
  const Eigen::VectorXd col_centre = m.col_coords.transpose() * m.col_masses;
  EXPECT_LT(row_centre.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(col_centre.cwiseAbs().maxCoeff(), 1e-10);
  // Row point k-th coordinate = (1/sigma_k) * sum_j profile_ij G_jk.
  for (int i = 0; i < 9; ++i) {
    const Eigen::VectorXd profile = x.row(i).transpose() / x.row(i).sum();
    for (int k = 0; k < m.factors(); ++k) {
      EXPECT_NEAR(m.row_coords(i, k), profile.dot(m.col_coords.col(k)) / m.singular_values(k), 1e-10);
    }
  }
}

TEST(Ca, SupplementaryProjection) {
  const auto x = positive_table(10, 6, 41);
  const auto m = ca_fit(x);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd f = project_supplementary(m, x.row(i).transpose());
    EXPECT_LT((f - m.row_coords.row(i).transpose()).cwiseAbs().maxCoeff(), 1e-10) << i;
    const Eigen::VectorXd g = project_supplementary(m, 7.0 * x.row(i).transpose());
    EXPECT_LT((g - f).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Eigen::VectorXd centroid = project_supplementary(m, m.col_masses);
  EXPECT_LT(centroid.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(project_supplementary(m, Eigen::VectorXd::Ones(5)), InvalidInput);
  EXPECT_THROW(project_supplementary(m, Eigen::VectorXd::Zero(6)), InvalidInput);
  Eigen::VectorXd negative = Eigen::VectorXd::Ones(6);
  negative(2) = -1.0;
  EXPECT_THROW(project_supplementary(m, negative), InvalidInput);
}

TEST(Ca, InvalidTables) {
  EXPECT_THROW(ca_fit(Eigen::MatrixXd::Ones(1, 4)), InvalidInput);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 3);
  x(0, 0) = -1.0;
  EXPECT_THROW(ca_fit(x), InvalidInput);
  x(0, 0) = std::nan("");
  EXPECT_THROW(ca_fit(x), InvalidInput);
  x = Eigen::MatrixXd::Ones(3, 3);
  x.col(1).setZero();
  EXPECT_THROW(ca_fit(x), InvalidInput);
}

TEST(Ca, NonnegPrepare) {
  Eigen::MatrixXd x(3, 3);
  x << 1, -2, 3, -0.5, 4, 1, 2, 2, -1;
  const auto r = nonneg_prepare(x);
  EXPECT_EQ(r.clipped, 3);
  EXPECT_TRUE((r.table.array() >= 0.0).all());
  EXPECT_EQ(r.table(0, 1), 0.0);
  EXPECT_EQ(r.table(2, 1), 2.0);

  Eigen::MatrixXd z(2, 3);
  z << 1, -1, 2, 3, -4, 1;
  EXPECT_THROW(nonneg_prepare(z), InvalidInput);
  EXPECT_EQ(zero_columns_after_clipping(z), std::vector<int>{1});
  z(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(nonneg_prepare(z), InvalidInput);
}

TEST(Ca, ModelRoundTrip) {
  auto m = ca_fit(positive_table(8, 5, 51));
  m.column_names = {"a", "b", "c", "d", "e"};
  testing::TempDir dir;
  save_model(m, dir / "model.txt");
  const auto loaded = load_model(dir / "model.txt");
  EXPECT_EQ(loaded.column_names, m.column_names);
  EXPECT_EQ(loaded.singular_values, m.singular_values);
  EXPECT_EQ(loaded.col_masses, m.col_masses);
  EXPECT_EQ(loaded.col_coords, m.col_coords);
  const Eigen::VectorXd row = Eigen::VectorXd::LinSpaced(5, 1.0, 3.0);
  EXPECT_EQ(project_supplementary(loaded, row), project_supplementary(m, row));
}

}  // namespace
}  // namespace mrgrade
