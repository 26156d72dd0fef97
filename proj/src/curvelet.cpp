#include "mrgrade/curvelet.hpp"

#include "mrgrade/atrous.hpp"
#include "mrgrade/keyvalue.hpp"
#include "mrgrade/ridgelet.hpp"

namespace mrgrade {

int CurveletConfig::block_size(int scale) const { return base_block << ((scale - 1) / 2); }

int CurveletConfig::total_bands() const {
  int total = include_smooth_band ? 1 : 0;
  for (int b : ridgelet_bands) total += b;
  return total;
}

void CurveletConfig::validate() const {
  if (wavelet_scales < 1) throw InvalidInput("curvelet: wavelet_scales must be >= 1");
  if (base_block < 2 || (base_block & (base_block - 1)) != 0) {
    throw InvalidInput("curvelet: base_block must be a power of two >= 2");
  }
  if (static_cast<int>(ridgelet_bands.size()) != wavelet_scales) {
    throw InvalidInput("curvelet: ridgelet_bands needs one entry per wavelet scale");
  }
  for (int s = 1; s <= wavelet_scales; ++s) {
    const int bands = ridgelet_bands[s - 1];
    if (bands < 2 || bands - 1 > max_atrous_levels(2 * block_size(s))) {
      throw InvalidInput("curvelet: " + std::to_string(bands) + " ridgelet bands do not fit block size " +
                         std::to_string(block_size(s)) + " at scale " + std::to_string(s));
    }
  }
}

CurveletConfig CurveletConfig::load(const std::filesystem::path& path) {
  const auto kv = KeyValues::load(path);
  kv.require_known({"wavelet_scales", "base_block", "ridgelet_bands", "include_smooth_band"});
  CurveletConfig cfg;
  if (auto v = kv.get_int("wavelet_scales")) cfg.wavelet_scales = *v;
  if (auto v = kv.get_int("base_block")) cfg.base_block = *v;
  if (auto v = kv.get_int_list("ridgelet_bands")) cfg.ridgelet_bands = *v;
  if (auto v = kv.get_bool("include_smooth_band")) cfg.include_smooth_band = *v;
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return cfg;
}

CurveletBands curvelet_transform(const ImageGrid& img, const CurveletConfig& cfg) {
  cfg.validate();
  return curvelet_transform(atrous_2d(img, cfg.wavelet_scales), cfg);
}

CurveletBands curvelet_transform(const WaveletDecomposition<double>& wavelet,
                                 const CurveletConfig& cfg) {
  cfg.validate();
  if (wavelet.levels() != cfg.wavelet_scales) {
    throw InvalidInput("curvelet: decomposition has " + std::to_string(wavelet.levels()) +
                       " scales, config expects " + std::to_string(cfg.wavelet_scales));
  }
  const int w = wavelet.smooth.width();
  const int h = wavelet.smooth.height();
  for (int s = 1; s <= cfg.wavelet_scales; ++s) {
    const int b = cfg.block_size(s);
    if (w % b != 0 || h % b != 0) {
      throw InvalidInput("curvelet: image " + std::to_string(w) + "x" + std::to_string(h) +
                         " is not divisible by block size " + std::to_string(b) + " at scale " +
                         std::to_string(s));
    }
  }

  CurveletBands out;
  out.bands.reserve(cfg.total_bands());
  out.labels.reserve(cfg.total_bands());
  for (int s = 1; s <= cfg.wavelet_scales; ++s) {
    const int b = cfg.block_size(s);
    const int n = 2 * b;
    const int nbands = cfg.ridgelet_bands[s - 1];
    const int depth = nbands - 1;
    const int blocks = (w / b) * (h / b);

    const std::size_t first = out.bands.size();
    for (int r = 0; r < nbands; ++r) {
      out.bands.emplace_back(static_cast<Eigen::Index>(blocks) * n, n);
      out.labels.push_back({s, r + 1});
    }

    RidgeletTransform transform(b);
    const auto& scale = wavelet.scales[s - 1].pixels();
    int block_index = 0;
    for (int by = 0; by < h; by += b) {
      for (int bx = 0; bx < w; bx += b, ++block_index) {
        const auto coeffs = transform.ridgelet(scale.block(by, bx, b, b), depth);
        for (int r = 0; r < nbands; ++r) {
          out.bands[first + r].middleRows(static_cast<Eigen::Index>(block_index) * n, n) =
              coeffs.bands[r].transpose().array();
        }
      }
    }
  }
  if (cfg.include_smooth_band) {
    out.bands.push_back(wavelet.smooth.pixels());
    out.labels.push_back({cfg.wavelet_scales + 1, 1});
  }
  return out;
}

}  // namespace mrgrade
