#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrgrade/atrous.hpp"
#include "mrgrade/image.hpp"

namespace mrgrade {

/// Layout of the blockwise-ridgelet curvelet transform.
///
/// `ridgelet_bands[s]` is the number of ridgelet bands kept for wavelet scale
/// s+1: that many minus one detail bands plus the ridgelet smooth band. Block
/// sizes start at `base_block` and double every two scales.
struct CurveletConfig {
  int wavelet_scales = 5;
  int base_block = 16;
  std::vector<int> ridgelet_bands = {4, 4, 4, 3, 3};
  bool include_smooth_band = true;

  int block_size(int scale) const;  // scale is 1-based
  int total_bands() const;
  void validate() const;

  /// Reads `key = value` lines (# comments) over the defaults. Recognised keys:
  /// wavelet_scales, base_block, ridgelet_bands (comma list), include_smooth_band.
  static CurveletConfig load(const std::filesystem::path& path);
};

/// (wavelet scale, ridgelet band) tag, both 1-based. The wavelet smooth band is
/// tagged (wavelet_scales + 1, 1).
struct BandLabel {
  int scale = 0;
  int band = 0;

  friend bool operator==(const BandLabel&, const BandLabel&) = default;
};

struct CurveletBands {
  /// Coefficients of one band from every block: 2B rows (offsets) per block,
  /// blocks in raster order, one column per pseudo-polar angle.
  std::vector<RowArrayXXd> bands;
  std::vector<BandLabel> labels;

  int size() const { return static_cast<int>(bands.size()); }
};

/// Wavelet decomposition followed by a blockwise ridgelet transform of every
/// detail scale. Throws InvalidInput when the image is not tiled exactly by a
/// scale's blocks or the config is inconsistent.
CurveletBands curvelet_transform(const ImageGrid& img, const CurveletConfig& cfg = {});

/// Same, starting from an existing decomposition with cfg.wavelet_scales scales.
CurveletBands curvelet_transform(const WaveletDecomposition<double>& wavelet,
                                 const CurveletConfig& cfg = {});

}  // namespace mrgrade
