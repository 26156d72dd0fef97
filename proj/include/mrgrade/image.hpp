#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

namespace mrgrade {

/// Raised for any malformed input file (PGM, CSV, config, model).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PgmError : public ParseError {
 public:
  enum class Kind { MalformedHeader, TruncatedData, UnsupportedMagic };

  PgmError(Kind kind, const std::string& what) : ParseError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Raised when input data violates a precondition of a numerical routine.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major raster of real-valued pixels.
///
/// Width and height are at least 1. The pixel buffer is an Eigen array so the
/// whole image can take part in expressions (`a.pixels() - b.pixels()`).
template <typename Scalar>
class Image {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Image() : pixels_(Array::Zero(1, 1)) {}

  Image(int width, int height, Scalar fill = Scalar(0)) {
    if (width < 1 || height < 1) {
      throw InvalidInput("image dimensions must be positive");
    }
    pixels_ = Array::Constant(height, width, fill);
  }

  explicit Image(Array pixels) : pixels_(std::move(pixels)) {
    if (pixels_.rows() < 1 || pixels_.cols() < 1) {
      throw InvalidInput("image dimensions must be positive");
    }
  }

  int width() const { return static_cast<int>(pixels_.cols()); }
  int height() const { return static_cast<int>(pixels_.rows()); }
  Eigen::Index size() const { return pixels_.size(); }

  Scalar& operator()(int row, int col) { return pixels_(row, col); }
  Scalar operator()(int row, int col) const { return pixels_(row, col); }

  Array& pixels() { return pixels_; }
  const Array& pixels() const { return pixels_; }

  std::span<Scalar> data() { return {pixels_.data(), static_cast<std::size_t>(pixels_.size())}; }
  std::span<const Scalar> data() const {
    return {pixels_.data(), static_cast<std::size_t>(pixels_.size())};
  }

  bool all_finite() const { return pixels_.isFinite().all(); }

 private:
  Array pixels_;
};

using ImageGrid = Image<double>;
using RowArrayXXd = ImageGrid::Array;

struct Gaussian {
  double mean = 0.0;
  double sigma = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

/// Seed plus the distribution a noise field is drawn from.
struct RngSpec {
  std::uint64_t seed = 0;
  std::variant<Gaussian, Uniform> distribution = Gaussian{};

  void validate() const;
};

/// Reads a binary (P5) or ASCII (P2) greymap. Values are returned in [0, maxval].
ImageGrid read_pgm(const std::filesystem::path& path);

/// Writes a binary P5 greymap with maxval 255. Pixels are clamped and rounded.
void write_pgm(const ImageGrid& img, const std::filesystem::path& path);

/// Rescales an arbitrary real image to [0, 255] for display.
ImageGrid rescale_for_display(const ImageGrid& img);

/// Independent draws from `spec.distribution`, one per pixel, reproducible from the seed.
ImageGrid noise_field(int width, int height, const RngSpec& spec);

ImageGrid add_gaussian_noise(const ImageGrid& img, double sigma, std::uint64_t seed);
ImageGrid add_gaussian_noise(const ImageGrid& img, double sigma, const RngSpec& rng);

/// Flat binary dump: int32 width, int32 height (little-endian), then width*height
/// little-endian doubles in row-major order.
void write_flat(const Eigen::Ref<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>& values,
                const std::filesystem::path& path);
ImageGrid read_flat(const std::filesystem::path& path);

}  // namespace mrgrade
