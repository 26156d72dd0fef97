#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrgrade/curvelet.hpp"
#include "mrgrade/image.hpp"
#include "mrgrade/moments.hpp"

namespace mrgrade {

inline constexpr int kDefaultWaveletScales = 5;

/// One feature column: which transform, which scale/band (1-based) and which
/// moment order (2, 3 or 4).
struct FeatureInfo {
  enum class Transform { Wavelet, Curvelet };
  Transform transform = Transform::Wavelet;
  int band = 1;
  int order = 2;

  /// `w1_m2` / `c01_m2` style column name.
  std::string name() const;
  /// Human-readable tag, e.g. "curvelet band 12, 4th order (kurtosis)".
  std::string describe() const;
};

/// Column layout: wavelet scales 1..J then curvelet bands, each as (m2, m3, m4).
std::vector<FeatureInfo> feature_layout(int wavelet_scales = kDefaultWaveletScales,
                                        const CurveletConfig& cfg = {});

struct FeatureVector {
  std::string image_id;
  std::optional<std::string> label;
  Eigen::VectorXd values;
};

/// Moments of the 5 wavelet detail scales and the 19 curvelet bands (72 values
/// under defaults). A constant band raises DegenerateInput naming the band.
FeatureVector extract_features(const ImageGrid& img, int wavelet_scales = kDefaultWaveletScales,
                               const CurveletConfig& cfg = {});

}  // namespace mrgrade
