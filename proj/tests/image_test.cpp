#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "mrgrade/image.hpp"
#include "mrgrade/synth.hpp"
#include "test_support.hpp"

namespace mrgrade {
namespace {

using testing::TempDir;
using testing::write_text;

PgmError::Kind read_error_kind(const std::filesystem::path& path) {
  try {
    read_pgm(path);
  } catch (const PgmError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no PgmError for " << path;
  return PgmError::Kind::MalformedHeader;
}

TEST(Image, RejectsEmptyDimensions) {
  EXPECT_THROW(ImageGrid(0, 3), InvalidInput);
  EXPECT_THROW(ImageGrid(3, 0), InvalidInput);
  ImageGrid img(3, 2, 7.0);
  EXPECT_EQ(img.width(), 3);
  EXPECT_EQ(img.height(), 2);
  EXPECT_EQ(img.data().size(), 6u);
  EXPECT_TRUE(img.all_finite());
  img(1, 2) = std::nan("");
  EXPECT_FALSE(img.all_finite());
}

TEST(Pgm, ReadsAsciiWithComments) {
  TempDir dir;
  write_text(dir / "a.pgm", "P2\n# a comment\n2 2\n# another\n255\n0 10\n20 30\n");
  const auto img = read_pgm(dir / "a.pgm");
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  EXPECT_EQ(img(0, 0), 0.0);
  EXPECT_EQ(img(0, 1), 10.0);
  EXPECT_EQ(img(1, 0), 20.0);
  EXPECT_EQ(img(1, 1), 30.0);
}

TEST(Pgm, ReadsBinaryFullSize) {
  TempDir dir;
  std::string bytes = "P5\n512 512\n255\n";
  for (int i = 0; i < 512 * 512; ++i) bytes.push_back(static_cast<char>(i % 251));
  write_text(dir / "b.pgm", bytes);
  const auto img = read_pgm(dir / "b.pgm");
  EXPECT_EQ(img.size(), 262144);
  EXPECT_EQ(img(0, 250), 250.0);
  EXPECT_EQ(img(0, 251), 0.0);
  EXPECT_EQ(img(511, 511), static_cast<double>((512 * 512 - 1) % 251));
}

TEST(Pgm, ReadsSixteenBitBigEndian) {
  TempDir dir;
  std::string bytes = "P5 2 1 1000\n";
  for (int v : {3, 232, 0, 7}) bytes.push_back(static_cast<char>(v));
  write_text(dir / "w.pgm", bytes);
  const auto img = read_pgm(dir / "w.pgm");
  EXPECT_EQ(img(0, 0), 1000.0);
  EXPECT_EQ(img(0, 1), 7.0);
}

TEST(Pgm, DistinctErrors) {
  TempDir dir;
  write_text(dir / "p3.pgm", "P3\n1 1\n255\n0 0 0\n");
  EXPECT_EQ(read_error_kind(dir / "p3.pgm"), PgmError::Kind::UnsupportedMagic);
  write_text(dir / "junk.pgm", "hello");
  EXPECT_EQ(read_error_kind(dir / "junk.pgm"), PgmError::Kind::UnsupportedMagic);
  write_text(dir / "hdr.pgm", "P5\n2 x\n255\n");
  EXPECT_EQ(read_error_kind(dir / "hdr.pgm"), PgmError::Kind::MalformedHeader);
  write_text(dir / "maxval.pgm", "P2\n1 1\n0\n0\n");
  EXPECT_EQ(read_error_kind(dir / "maxval.pgm"), PgmError::Kind::MalformedHeader);
  write_text(dir / "short5.pgm", "P5\n4 4\n255\nabc");
  EXPECT_EQ(read_error_kind(dir / "short5.pgm"), PgmError::Kind::TruncatedData);
  write_text(dir / "short2.pgm", "P2\n2 2\n255\n1 2 3\n");
  EXPECT_EQ(read_error_kind(dir / "short2.pgm"), PgmError::Kind::TruncatedData);
}

TEST(Pgm, WriteClampsAndRounds) {
  TempDir dir;
  ImageGrid img(3, 1);
  img(0, 0) = 300.0;
  img(0, 1) = -5.0;
  img(0, 2) = 12.6;
  write_pgm(img, dir / "c.pgm");
  const auto back = read_pgm(dir / "c.pgm");
  EXPECT_EQ(back(0, 0), 255.0);
  EXPECT_EQ(back(0, 1), 0.0);
  EXPECT_EQ(back(0, 2), 13.0);
}

TEST(Pgm, RoundTripIntegralImage) {
  TempDir dir;
  auto img = testing::random_image(37, 23, 5);
  img.pixels() = img.pixels().round();
  write_pgm(img, dir / "r.pgm");
  const auto back = read_pgm(dir / "r.pgm");
  ASSERT_EQ(back.width(), 37);
  ASSERT_EQ(back.height(), 23);
  EXPECT_TRUE((back.pixels() == img.pixels()).all());
}

TEST(FlatDump, LayoutAndRoundTrip) {
  TempDir dir;
  const auto a = testing::random_array(3, 5, 9);
  write_flat(a, dir / "f.bin");
  std::ifstream in(dir / "f.bin", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_EQ(bytes.size(), 8u + 15u * 8u);
  EXPECT_EQ(bytes[0], 5);  // width, little-endian
  EXPECT_EQ(bytes[4], 3);  // height
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 8, sizeof first);
  EXPECT_EQ(first, a(0, 0));
  const auto back = read_flat(dir / "f.bin");
  EXPECT_TRUE((back.pixels() == a).all());
}

TEST(Noise, VarianceOfResidual) {
  const ImageGrid img = testing::random_image(512, 512, 1);
  const auto noisy = add_gaussian_noise(img, 10.0, 77);
  const RowArrayXXd r = noisy.pixels() - img.pixels();
  const double n = static_cast<double>(r.size());
  double mean = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) mean += r.data()[i];
  mean /= n;
  double var = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) var += (r.data()[i] - mean) * (r.data()[i] - mean);
  var /= n - 1.0;
  EXPECT_NEAR(var, 100.0, 5.0);
  EXPECT_LT(std::abs(mean), 4.0 * 10.0 / std::sqrt(n));
}

TEST(Noise, Deterministic) {
  const ImageGrid img(64, 32, 100.0);
  const auto a = add_gaussian_noise(img, 3.0, 5);
  const auto b = add_gaussian_noise(img, 3.0, 5);
  const auto c = add_gaussian_noise(img, 3.0, 6);
  EXPECT_TRUE((a.pixels() == b.pixels()).all());
  EXPECT_FALSE((a.pixels() == c.pixels()).all());
  EXPECT_EQ(a.width(), 64);
  EXPECT_EQ(a.height(), 32);
}

TEST(Noise, MeanOnConstantImage) {
  const ImageGrid img(512, 512, 90.0);
  const auto noisy = add_gaussian_noise(img, 20.0, RngSpec{3, Gaussian{0.0, 20.0}});
  EXPECT_NEAR(noisy.pixels().mean(), 90.0, 3.0 * 20.0 / 512.0);
}

TEST(Noise, RejectsBadParameters) {
  const ImageGrid img(4, 4);
  EXPECT_THROW(add_gaussian_noise(img, 0.0, 1), InvalidInput);
  EXPECT_THROW(add_gaussian_noise(img, -1.0, 1), InvalidInput);
  EXPECT_THROW((RngSpec{1, Gaussian{0.0, 0.0}}.validate()), InvalidInput);
  EXPECT_THROW((RngSpec{1, Uniform{2.0, 2.0}}.validate()), InvalidInput);
}

TEST(Noise, UniformFieldRange) {
  const auto f = noise_field(200, 100, RngSpec{4, Uniform{-3.0, 5.0}});
  EXPECT_GE(f.pixels().minCoeff(), -3.0);
  EXPECT_LT(f.pixels().maxCoeff(), 5.0);
  EXPECT_NEAR(f.pixels().mean(), 1.0, 4.0 * 8.0 / std::sqrt(12.0 * 20000.0));
}

TEST(Synth, EmptySceneIsBackground) {
  const auto img = synth_texture(Disks{8.0, 0.0, 0}, 64, 48, 1);
  EXPECT_TRUE((img.pixels() == kBackgroundLevel).all());
}

TEST(Synth, SingleHorizontalLine) {
  const auto img = synth_texture(Lines{0.0, 1, 1}, 64, 64, 12);
  int bright_rows = 0;
  for (int y = 0; y < 64; ++y) {
    const int bright = (img.pixels().row(y) == kLineLevel).count();
    if (bright > 0) {
      EXPECT_EQ(bright, 64);
      ++bright_rows;
    }
  }
  EXPECT_EQ(bright_rows, 1);
  EXPECT_EQ((img.pixels() == kLineLevel).count(), 64);
  EXPECT_EQ((img.pixels() == kBackgroundLevel).count(), 64 * 63);
}

TEST(Synth, PureFunctionOfInputs) {
  const auto spec = parse_texture("mixture(0.5 * disks(4, 1, 200) + 0.5 * disks(12, 2, 40))");
  const auto a = synth_texture(spec, 128, 96, 42);
  const auto b = synth_texture(spec, 128, 96, 42);
  const auto c = synth_texture(spec, 128, 96, 43);
  EXPECT_TRUE((a.pixels() == b.pixels()).all());
  EXPECT_FALSE((a.pixels() == c.pixels()).all());
  EXPECT_GE(a.pixels().minCoeff(), 0.0);
  EXPECT_LE(a.pixels().maxCoeff(), 255.0);
}

TEST(Synth, DiskSizesShowInCoverage) {
  const auto small = synth_texture(Disks{2.0, 0.0, 300}, 256, 256, 3);
  const auto large = synth_texture(Disks{10.0, 0.0, 300}, 256, 256, 3);
  EXPECT_LT((small.pixels() != kBackgroundLevel).count(), (large.pixels() != kBackgroundLevel).count());
}

TEST(Synth, ValidationErrors) {
  EXPECT_THROW(validate(TextureSpec{Disks{4.0, 1.0, -1}}), InvalidInput);
  EXPECT_THROW(validate(TextureSpec{Disks{0.0, 1.0, 5}}), InvalidInput);
  EXPECT_THROW(validate(TextureSpec{Lines{10.0, 3, 0}}), InvalidInput);
  Mixture bad{{{0.5, Disks{4.0, 1.0, 10}}, {0.4, Disks{8.0, 1.0, 10}}}};
  EXPECT_THROW(validate(TextureSpec{bad}), InvalidInput);
  EXPECT_THROW(synth_texture(TextureSpec{bad}, 32, 32, 1), InvalidInput);
  EXPECT_NO_THROW(validate(TextureSpec{Disks{4.0, 0.0, 0}}));
}

TEST(Synth, ParserAcceptsAndRejects) {
  const auto spec = parse_texture(" lines( 45 , 10, 2 ) ");
  const auto* lines = std::get_if<Lines>(&spec);
  ASSERT_NE(lines, nullptr);
  EXPECT_EQ(lines->angle_deg, 45.0);
  EXPECT_EQ(lines->count, 10);
  EXPECT_EQ(lines->thickness, 2);

  const auto mix = parse_texture("mixture(0.25 * blobs(8, 40) + 0.75 * disks(6, 1.5, 300))");
  const auto* m = std::get_if<Mixture>(&mix);
  ASSERT_NE(m, nullptr);
  ASSERT_EQ(m->components.size(), 2u);
  EXPECT_EQ(m->components[0].first, 0.25);
  EXPECT_EQ(std::get<Disks>(m->components[1].second).radius_sd, 1.5);

  EXPECT_THROW(parse_texture("squares(3, 4)"), ParseError);
  EXPECT_THROW(parse_texture("disks(3, 4)"), ParseError);
  EXPECT_THROW(parse_texture("disks(3, 1, 2.5)"), ParseError);
  EXPECT_THROW(parse_texture("mixture(disks(3, 1, 2))"), ParseError);

  const auto again = parse_texture(to_string(mix));
  EXPECT_EQ(to_string(again), to_string(mix));
}

}  // namespace
}  // namespace mrgrade
