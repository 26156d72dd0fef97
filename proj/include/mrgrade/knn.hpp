#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mrgrade {

struct LabeledPoints {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  Eigen::MatrixXd coords;  // one point per row

  int size() const { return static_cast<int>(coords.rows()); }
  int dims() const { return static_cast<int>(coords.cols()); }
  void validate() const;

  /// Same points restricted to the first `d` coordinates.
  LabeledPoints truncated(int d) const;
};

/// Majority label among the k Euclidean-nearest training points (linear scan).
/// Distance ties go to the lower training index; vote ties go to the class
/// that sorts first.
std::string knn_classify(const LabeledPoints& train, const Eigen::Ref<const Eigen::VectorXd>& query,
                         int k = 1);

struct SweepPoint {
  int dims = 0;
  int correct = 0;
};

/// Classifies every test point on the first d coordinates for d = dmin..dmax
/// and reports the raw number of correct assignments.
std::vector<SweepPoint> dimension_sweep(const LabeledPoints& train, const LabeledPoints& test,
                                        int dmin, int dmax, int k = 1);

struct ConfusionMatrix {
  std::vector<std::string> classes;  // sorted
  Eigen::MatrixXi counts;            // rows: true class, columns: predicted class

  int correct() const { return counts.trace(); }
  int total() const { return counts.sum(); }

  /// Aligned text table with "(real) class" rows and "(found) class" columns.
  std::string to_text() const;
  std::string to_csv() const;
};

/// Confusion matrix of k-NN on the first `d` coordinates (d <= 0 means all).
ConfusionMatrix confusion(const LabeledPoints& train, const LabeledPoints& test, int d, int k = 1);

}  // namespace mrgrade
