#include "mrgrade/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrgrade/atrous.hpp"

namespace mrgrade {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRelativeTolerance = 1e-10;
constexpr double kMaxDamping = 1e30;

using Params = Eigen::Vector3d;  // amplitude, centre, width

double sse(const Histogram& hist, PeakModel model, const Params& p) {
  double total = 0.0;
  for (int i = 0; i < hist.bins(); ++i) {
    const double r = hist.counts(i) - evaluate(model, p(0), p(1), p(2), hist.bin_centers(i));
    total += r * r;
  }
  return total;
}

// Jacobian of the model (not the residual) with respect to the parameters.
void jacobian(const Histogram& hist, PeakModel model, const Params& p, Eigen::MatrixX3d& jac,
              Eigen::VectorXd& residual) {
  const double a = p(0);
  const double x0 = p(1);
  const double w = p(2);
  for (int i = 0; i < hist.bins(); ++i) {
    const double u = (hist.bin_centers(i) - x0) / w;
    if (model == PeakModel::Gaussian) {
      const double e = std::exp(-0.5 * u * u);
      jac(i, 0) = e;
      jac(i, 1) = a * e * u / w;
      jac(i, 2) = a * e * u * u / w;
      residual(i) = hist.counts(i) - a * e;
    } else {
      const double q = 1.0 / (1.0 + u * u);
      jac(i, 0) = q;
      jac(i, 1) = 2.0 * a * q * q * u / w;
      jac(i, 2) = 2.0 * a * q * q * u * u / w;
      residual(i) = hist.counts(i) - a * q;
    }
  }
}

// Full width at half maximum around the modal bin, interpolated linearly.
double fwhm_estimate(const Histogram& hist, int peak) {
  const double half = 0.5 * hist.counts(peak);
  const double bin_width = hist.bins() > 1 ? hist.bin_centers(1) - hist.bin_centers(0) : 1.0;
  auto crossing = [&](int dir) {
    int i = peak;
    while (i + dir >= 0 && i + dir < hist.bins() && hist.counts(i + dir) > half) i += dir;
    if (i + dir < 0 || i + dir >= hist.bins()) return hist.bin_centers(i);
    const double c0 = hist.counts(i);
    const double c1 = hist.counts(i + dir);
    const double t = c0 == c1 ? 0.5 : (c0 - half) / (c0 - c1);
    return hist.bin_centers(i) + dir * t * bin_width;
  };
  const double width = crossing(+1) - crossing(-1);
  return std::max(width, bin_width);
}

}  // namespace

Histogram make_histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw InvalidInput("histogram: no data");
  if (bins < 1) throw InvalidInput("histogram: bins must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw InvalidInput("histogram: constant data");

  Histogram hist;
  hist.min = lo;
  hist.max = hi;
  hist.counts = Eigen::VectorXd::Zero(bins);
  hist.bin_centers.resize(bins);
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) hist.bin_centers(i) = lo + (i + 0.5) * width;
  for (const double v : values) {
    const int idx = std::min(bins - 1, static_cast<int>(std::floor((v - lo) / width)));
    hist.counts(std::max(0, idx)) += 1.0;
  }
  return hist;
}

const char* to_string(PeakModel model) {
  return model == PeakModel::Gaussian ? "gaussian" : "lorentzian";
}

double evaluate(PeakModel model, double amplitude, double center, double width, double x) {
  const double u = (x - center) / width;
  if (model == PeakModel::Gaussian) return amplitude * std::exp(-0.5 * u * u);
  return amplitude / (1.0 + u * u);
}

double fit_mse(const Histogram& hist, PeakModel model, double amplitude, double center,
               double width) {
  return sse(hist, model, Params(amplitude, center, width)) / hist.bins();
}

PeakFit fit_peak(const Histogram& hist, PeakModel model) {
  if (hist.bins() < 3) throw InvalidInput("fit_peak: need at least 3 bins");
  int peak = 0;
  hist.counts.maxCoeff(&peak);
  const double fwhm = fwhm_estimate(hist, peak);
  Params p(hist.counts(peak), hist.bin_centers(peak),
           model == PeakModel::Gaussian ? fwhm / 2.355 : fwhm / 2.0);

  const int n = hist.bins();
  Eigen::MatrixX3d jac(n, 3);
  Eigen::VectorXd residual(n);
  double current = sse(hist, model, p);
  double lambda = 1e-3;

  PeakFit fit;
  fit.model = model;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    fit.iterations = iter;
    if (current == 0.0) {
      fit.converged = true;
      break;
    }
    jacobian(hist, model, p, jac, residual);
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * residual;

    bool accepted = false;
    double trial_sse = current;
    Params trial = p;
    while (lambda < kMaxDamping) {
      Eigen::Matrix3d damped = jtj;
      for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      trial = p + damped.ldlt().solve(jtr);
      trial(2) = std::abs(trial(2));
      trial_sse = trial(2) > 0.0 ? sse(hist, model, trial) : std::numeric_limits<double>::infinity();
      if (std::isfinite(trial_sse) && trial_sse < current) {
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at working precision: a minimum.
      fit.converged = true;
      break;
    }
    const double reduction = (current - trial_sse) / current;
    p = trial;
    current = trial_sse;
    lambda = std::max(lambda / 10.0, 1e-12);
    if (reduction < kRelativeTolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.amplitude = p(0);
  fit.center = p(1);
  fit.width = p(2);
  fit.mse = current / n;
  return fit;
}

std::vector<FitComparison> compare_fits(const ImageGrid& img, int scales) {
  const auto dec = atrous_2d(img, scales);
  std::vector<FitComparison> table;
  for (int s = 0; s < scales; ++s) {
    Histogram hist;
    try {
      hist = histogram_100(dec.scales[s].data());
    } catch (const InvalidInput& e) {
      throw InvalidInput("wavelet scale " + std::to_string(s + 1) + ": " + e.what());
    }
    const auto lorentz = fit_peak(hist, PeakModel::Lorentzian);
    const auto gauss = fit_peak(hist, PeakModel::Gaussian);
    table.push_back({s + 1, lorentz.mse, gauss.mse,
                     lorentz.mse < gauss.mse ? PeakModel::Lorentzian : PeakModel::Gaussian});
  }
  return table;
}

}  // namespace mrgrade
