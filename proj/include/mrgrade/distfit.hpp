#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrgrade/image.hpp"

namespace mrgrade {

inline constexpr int kHistogramBins = 100;

/// Equal-width histogram over [min, max] of the data; the last bin is closed.
struct Histogram {
  Eigen::VectorXd bin_centers;
  Eigen::VectorXd counts;
  double min = 0.0;
  double max = 0.0;

  int bins() const { return static_cast<int>(counts.size()); }
};

Histogram make_histogram(std::span<const double> values, int bins = kHistogramBins);

/// 100-bin histogram. Throws InvalidInput when the data are constant or empty.
inline Histogram histogram_100(std::span<const double> values) { return make_histogram(values); }

enum class PeakModel { Gaussian, Lorentzian };

const char* to_string(PeakModel model);

/// Gaussian:   A exp(-(x - x0)^2 / (2 w^2))
/// Lorentzian: A / (1 + ((x - x0) / w)^2)
double evaluate(PeakModel model, double amplitude, double center, double width, double x);

struct PeakFit {
  PeakModel model = PeakModel::Gaussian;
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.0;
  /// Mean over bins of squared residual counts.
  double mse = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Mean squared residual of a model against the histogram counts.
double fit_mse(const Histogram& hist, PeakModel model, double amplitude, double center, double width);

/// Levenberg-Marquardt fit of amplitude, centre and width to the counts.
/// Starts from the modal bin and a half-maximum width estimate. Stops when an
/// accepted step reduces the squared error by less than 1e-10 relative, or
/// after 200 iterations (then `converged` is false).
PeakFit fit_peak(const Histogram& hist, PeakModel model);

struct FitComparison {
  int scale = 0;
  double lorentzian_mse = 0.0;
  double gaussian_mse = 0.0;
  PeakModel winner = PeakModel::Gaussian;
};

/// Fits both peak models to the histogram of each wavelet detail scale 1..J.
std::vector<FitComparison> compare_fits(const ImageGrid& img, int scales);

}  // namespace mrgrade
