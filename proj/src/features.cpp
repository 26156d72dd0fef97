#include "mrgrade/features.hpp"

#include <cstdio>

#include "mrgrade/atrous.hpp"

namespace mrgrade {

namespace {

const char* moment_name(int order) {
  switch (order) {
    case 2: return "2nd order (variance)";
    case 3: return "3rd order (skewness)";
    default: return "4th order (kurtosis)";
  }
}

void put_triple(Eigen::VectorXd& values, Eigen::Index at, const MomentTriple& m) {
  values(at) = m.variance;
  values(at + 1) = m.skewness;
  values(at + 2) = m.kurtosis;
}

}  // namespace

std::string FeatureInfo::name() const {
  char buf[32];
  if (transform == Transform::Wavelet) {
    std::snprintf(buf, sizeof buf, "w%d_m%d", band, order);
  } else {
    std::snprintf(buf, sizeof buf, "c%02d_m%d", band, order);
  }
  return buf;
}

std::string FeatureInfo::describe() const {
  const std::string what = transform == Transform::Wavelet ? "wavelet scale " : "curvelet band ";
  return what + std::to_string(band) + ", " + moment_name(order);
}

std::vector<FeatureInfo> feature_layout(int wavelet_scales, const CurveletConfig& cfg) {
  std::vector<FeatureInfo> layout;
  for (int s = 1; s <= wavelet_scales; ++s) {
    for (int k = 2; k <= 4; ++k) layout.push_back({FeatureInfo::Transform::Wavelet, s, k});
  }
  for (int b = 1; b <= cfg.total_bands(); ++b) {
    for (int k = 2; k <= 4; ++k) layout.push_back({FeatureInfo::Transform::Curvelet, b, k});
  }
  return layout;
}

FeatureVector extract_features(const ImageGrid& img, int wavelet_scales, const CurveletConfig& cfg) {
  const auto wavelet = atrous_2d(img, wavelet_scales);
  const int nbands = cfg.total_bands();

  FeatureVector fv;
  fv.values.resize(3 * (wavelet_scales + nbands));
  for (int s = 0; s < wavelet_scales; ++s) {
    try {
      put_triple(fv.values, 3 * s, moments(wavelet.scales[s].pixels()));
    } catch (const DegenerateInput&) {
      throw DegenerateInput("degenerate coefficients in wavelet scale " + std::to_string(s + 1));
    }
  }

  const auto curvelet = cfg.wavelet_scales == wavelet_scales ? curvelet_transform(wavelet, cfg)
                                                             : curvelet_transform(img, cfg);
  for (int b = 0; b < nbands; ++b) {
    try {
      put_triple(fv.values, 3 * (wavelet_scales + b), moments(curvelet.bands[b]));
    } catch (const DegenerateInput&) {
      const auto& label = curvelet.labels[b];
      throw DegenerateInput("degenerate coefficients in curvelet band " + std::to_string(b + 1) +
                            " (scale " + std::to_string(label.scale) + ", ridgelet band " +
                            std::to_string(label.band) + ")");
    }
  }
  return fv;
}

}  // namespace mrgrade
