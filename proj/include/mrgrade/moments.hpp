#pragma once

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "mrgrade/image.hpp"

namespace mrgrade {

/// Central-moment summary of a coefficient array.
///
/// variance = m2, skewness = m3 / m2^1.5, kurtosis = m4 / m2^2 (non-excess,
/// 3 for a Gaussian), with m_k = (1/N) sum (x - mean)^k.
struct MomentTriple {
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

/// Thrown for (near-)constant input instead of returning NaN.
class DegenerateInput : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline constexpr double kDegenerateVariance = 1e-20;

/// Two-pass population moments. Requires at least 4 samples and
/// variance > 1e-20.
template <typename Derived>
MomentTriple moments(const Eigen::DenseBase<Derived>& coeffs) {
  const Eigen::Index n = coeffs.size();
  if (n < 4) throw InvalidInput("moments: need at least 4 samples");
  const double mean = static_cast<double>(coeffs.derived().sum()) / static_cast<double>(n);
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  const auto& x = coeffs.derived();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double d = static_cast<double>(x(r, c)) - mean;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > kDegenerateVariance)) throw DegenerateInput("moments: degenerate (near-constant) input");
  return {m2, m3 / (m2 * std::sqrt(m2)), m4 / (m2 * m2)};
}

inline MomentTriple moments(std::span<const double> coeffs) {
  return moments(Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())));
}

}  // namespace mrgrade
