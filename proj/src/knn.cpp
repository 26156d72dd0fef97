#include "mrgrade/knn.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "mrgrade/image.hpp"

namespace mrgrade {

void LabeledPoints::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != coords.rows()) {
    throw InvalidInput("labeled points: label count does not match rows");
  }
  if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != coords.rows()) {
    throw InvalidInput("labeled points: id count does not match rows");
  }
  if (coords.cols() < 1) throw InvalidInput("labeled points: need at least one dimension");
}

LabeledPoints LabeledPoints::truncated(int d) const {
  if (d < 1 || d > dims()) throw InvalidInput("truncated: dimension out of range");
  return {ids, labels, coords.leftCols(d)};
}

std::string knn_classify(const LabeledPoints& train, const Eigen::Ref<const Eigen::VectorXd>& query,
                         int k) {
  train.validate();
  if (query.size() != train.dims()) {
    throw InvalidInput("knn: query has " + std::to_string(query.size()) + " dims, training data " +
                       std::to_string(train.dims()));
  }
  if (k < 1 || k > train.size()) throw InvalidInput("knn: k must be in 1..training size");

  const int n = train.size();
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    dist[i] = {(train.coords.row(i).transpose() - query).squaredNorm(), i};
  }
  // Pair ordering breaks distance ties by index.
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  if (k == 1) return train.labels[dist[0].second];

  std::map<std::string, int> votes;  // sorted class order
  for (int i = 0; i < k; ++i) ++votes[train.labels[dist[i].second]];
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

std::vector<SweepPoint> dimension_sweep(const LabeledPoints& train, const LabeledPoints& test,
                                        int dmin, int dmax, int k) {
  train.validate();
  test.validate();
  if (train.dims() != test.dims()) throw InvalidInput("sweep: train and test dimensions differ");
  if (dmin < 1 || dmin > dmax || dmax > train.dims()) {
    throw InvalidInput("sweep: need 1 <= dmin <= dmax <= " + std::to_string(train.dims()));
  }
  std::vector<SweepPoint> out;
  for (int d = dmin; d <= dmax; ++d) {
    const LabeledPoints sub = train.truncated(d);
    int correct = 0;
    for (int i = 0; i < test.size(); ++i) {
      const Eigen::VectorXd q = test.coords.row(i).head(d).transpose();
      if (knn_classify(sub, q, k) == test.labels[i]) ++correct;
    }
    out.push_back({d, correct});
  }
  return out;
}

ConfusionMatrix confusion(const LabeledPoints& train, const LabeledPoints& test, int d, int k) {
  train.validate();
  test.validate();
  if (train.dims() != test.dims()) throw InvalidInput("confusion: train and test dimensions differ");
  if (d <= 0) d = train.dims();
  const LabeledPoints sub = train.truncated(d);

  std::set<std::string> classes(train.labels.begin(), train.labels.end());
  classes.insert(test.labels.begin(), test.labels.end());
  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  const auto index = [&](const std::string& c) {
    return static_cast<int>(std::lower_bound(cm.classes.begin(), cm.classes.end(), c) - cm.classes.begin());
  };
  const int c = static_cast<int>(cm.classes.size());
  cm.counts = Eigen::MatrixXi::Zero(c, c);
  for (int i = 0; i < test.size(); ++i) {
    const Eigen::VectorXd q = test.coords.row(i).head(d).transpose();
    ++cm.counts(index(test.labels[i]), index(knn_classify(sub, q, k)));
  }
  return cm;
}

std::string ConfusionMatrix::to_text() const {
  std::size_t width = 5;
  for (const auto& c : classes) width = std::max(width, c.size());
  std::ostringstream os;
  const std::string head = "(found) class";
  const std::string real = "(real) class ";
  const std::size_t lead = std::max(head.size(), real.size() + width);
  auto pad = [](const std::string& s, std::size_t w) {
    return std::string(w > s.size() ? w - s.size() : 0, ' ') + s;
  };
  os << head << std::string(lead - head.size(), ' ') << " |";
  for (const auto& c : classes) os << ' ' << pad(c, width);
  os << "\n" << std::string(lead + 2 + classes.size() * (width + 1), '-') << "\n";
  for (std::size_t r = 0; r < classes.size(); ++r) {
    const std::string left = (r == 0 ? real : std::string(real.size(), ' ')) + pad(classes[r], width);
    os << pad(left, lead) << " |";
    for (std::size_t col = 0; col < classes.size(); ++col) {
      os << ' ' << pad(std::to_string(counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col))), width);
    }
    os << "\n";
  }
  return os.str();
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream os;
  os << "real\\found";
  for (const auto& c : classes) os << ',' << c;
  os << "\n";
  for (std::size_t r = 0; r < classes.size(); ++r) {
    os << classes[r];
    for (std::size_t col = 0; col < classes.size(); ++col) {
      os << ',' << counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col));
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace mrgrade
