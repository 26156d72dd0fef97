#include "mrgrade/image.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "mrgrade/random.hpp"

namespace mrgrade {

namespace {

using Kind = PgmError::Kind;

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  // Returns -1 when no digits are present.
  long read_uint(Kind on_error, const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw PgmError(on_error, std::string("PGM: expected unsigned integer for ") + field);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 30)) throw PgmError(on_error, std::string("PGM: ") + field + " too large");
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  unsigned char at(std::size_t i) const { return bytes_[i]; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
void put_le(std::ostream& out, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(const unsigned char* p) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void RngSpec::validate() const {
  if (const auto* g = std::get_if<Gaussian>(&distribution)) {
    if (!(g->sigma > 0.0)) throw InvalidInput("gaussian sigma must be positive");
  } else if (const auto* u = std::get_if<Uniform>(&distribution)) {
    if (!(u->lo < u->hi)) throw InvalidInput("uniform range requires lo < hi");
  }
}

ImageGrid read_pgm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw PgmError(Kind::UnsupportedMagic, "PGM: missing magic number in " + path.string());
  }
  const char type = static_cast<char>(bytes[1]);
  if (type != '2' && type != '5') {
    throw PgmError(Kind::UnsupportedMagic,
                   std::string("PGM: unsupported magic P") + type + " in " + path.string());
  }

  HeaderReader header(bytes);
  header.advance(2);
  const long width = header.read_uint(Kind::MalformedHeader, "width");
  const long height = header.read_uint(Kind::MalformedHeader, "height");
  const long maxval = header.read_uint(Kind::MalformedHeader, "maxval");
  if (width < 1 || height < 1) throw PgmError(Kind::MalformedHeader, "PGM: zero dimension");
  if (maxval < 1 || maxval > 65535) throw PgmError(Kind::MalformedHeader, "PGM: bad maxval");

  ImageGrid img(static_cast<int>(width), static_cast<int>(height));
  auto out = img.data();
  const std::size_t count = out.size();

  if (type == '5') {
    // Exactly one whitespace byte separates maxval from the raster.
    if (header.remaining() < 1 || !std::isspace(header.at(header.pos()))) {
      throw PgmError(Kind::MalformedHeader, "PGM: missing separator after maxval");
    }
    header.advance(1);
    const std::size_t sample = maxval > 255 ? 2 : 1;
    if (header.remaining() < count * sample) {
      throw PgmError(Kind::TruncatedData, "PGM: truncated pixel data in " + path.string());
    }
    const std::size_t base = header.pos();
    for (std::size_t i = 0; i < count; ++i) {
      if (sample == 1) {
        out[i] = header.at(base + i);
      } else {
        out[i] = header.at(base + 2 * i) * 256.0 + header.at(base + 2 * i + 1);
      }
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      header.skip_space_and_comments();
      if (header.remaining() == 0) {
        throw PgmError(Kind::TruncatedData, "PGM: truncated pixel data in " + path.string());
      }
      const long v = header.read_uint(Kind::TruncatedData, "pixel");
      out[i] = static_cast<double>(v);
    }
  }
  return img;
}

void write_pgm(const ImageGrid& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raster(static_cast<std::size_t>(img.size()));
  const auto in = img.data();
  for (std::size_t i = 0; i < raster.size(); ++i) {
    raster[i] = static_cast<unsigned char>(std::lround(std::clamp(in[i], 0.0, 255.0)));
  }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ImageGrid rescale_for_display(const ImageGrid& img) {
  const double lo = img.pixels().minCoeff();
  const double hi = img.pixels().maxCoeff();
  if (hi - lo <= 0.0) return ImageGrid(img.width(), img.height(), 0.0);
  return ImageGrid(ImageGrid::Array((img.pixels() - lo) * (255.0 / (hi - lo))));
}

ImageGrid noise_field(int width, int height, const RngSpec& spec) {
  spec.validate();
  ImageGrid field(width, height);
  Rng rng(spec.seed);
  auto px = field.data();
  if (const auto* g = std::get_if<Gaussian>(&spec.distribution)) {
    for (auto& v : px) v = rng.normal(g->mean, g->sigma);
  } else {
    const auto& u = std::get<Uniform>(spec.distribution);
    for (auto& v : px) v = rng.uniform(u.lo, u.hi);
  }
  return field;
}

ImageGrid add_gaussian_noise(const ImageGrid& img, double sigma, const RngSpec& rng) {
  if (!(sigma > 0.0)) throw InvalidInput("noise sigma must be positive");
  const RngSpec spec{rng.seed, Gaussian{0.0, sigma}};
  const ImageGrid noise = noise_field(img.width(), img.height(), spec);
  return ImageGrid(ImageGrid::Array(img.pixels() + noise.pixels()));
}

ImageGrid add_gaussian_noise(const ImageGrid& img, double sigma, std::uint64_t seed) {
  return add_gaussian_noise(img, sigma, RngSpec{seed, Gaussian{0.0, sigma}});
}

void write_flat(const Eigen::Ref<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>& values,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  put_le<std::int32_t>(out, static_cast<std::int32_t>(values.cols()));
  put_le<std::int32_t>(out, static_cast<std::int32_t>(values.rows()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) put_le<double>(out, values(r, c));
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ImageGrid read_flat(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 8) throw ParseError("flat dump: missing dimensions");
  const auto width = get_le<std::int32_t>(bytes.data());
  const auto height = get_le<std::int32_t>(bytes.data() + 4);
  if (width < 1 || height < 1) throw ParseError("flat dump: bad dimensions");
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() != 8 + count * sizeof(double)) throw ParseError("flat dump: size mismatch");
  ImageGrid img(width, height);
  auto px = img.data();
  for (std::size_t i = 0; i < count; ++i) px[i] = get_le<double>(bytes.data() + 8 + i * 8);
  return img;
}

}  // namespace mrgrade
