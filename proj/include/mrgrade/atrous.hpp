#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "mrgrade/image.hpp"

namespace mrgrade {

/// B3 spline scaling filter (1/16)[1, 4, 6, 4, 1].
inline constexpr std::array<double, 5> kB3Taps = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

/// Mirror index without repeating the edge sample: -1 -> 1, n -> n-2.
constexpr int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

/// Largest number of detail scales the kernel allows for a signal of `length`.
constexpr int max_atrous_levels(int length) {
  int levels = 0;
  while ((4 << levels) < length) ++levels;  // 2^(J-1) * 4 < length
  return levels;
}

template <typename Scalar>
struct WaveletDecomposition {
  std::vector<Image<Scalar>> scales;  // w_1 .. w_J, finest first
  Image<Scalar> smooth;               // c_J

  int levels() const { return static_cast<int>(scales.size()); }

  Image<Scalar> reconstruct() const {
    typename Image<Scalar>::Array sum = smooth.pixels();
    for (const auto& w : scales) sum += w.pixels();
    return Image<Scalar>(std::move(sum));
  }
};

template <typename Scalar>
struct WaveletDecomposition1D {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::vector<Vector> details;
  Vector smooth;

  int levels() const { return static_cast<int>(details.size()); }
};

namespace detail {

// One smoothing pass along a strided line: out[i] = sum_t h_t * in[reflect(i + (t-2)*step)].
template <typename Scalar>
void smooth_line(const Scalar* in, Scalar* out, int n, std::ptrdiff_t stride, int step) {
  for (int i = 0; i < n; ++i) {
    Scalar acc(0);
    for (int t = 0; t < 5; ++t) {
      const int j = reflect_index(i + (t - 2) * step, n);
      acc += static_cast<Scalar>(kB3Taps[t]) * in[j * stride];
    }
    out[i * stride] = acc;
  }
}

inline void check_levels(int levels, int length, const char* what) {
  if (levels < 1) throw InvalidInput(std::string(what) + ": number of scales must be >= 1");
  if (levels > max_atrous_levels(length)) {
    throw InvalidInput(std::string(what) + ": " + std::to_string(levels) +
                       " scales do not fit a signal of length " + std::to_string(length));
  }
}

}  // namespace detail

/// Redundant B3-spline a trous transform of a 1-D signal.
template <typename Derived>
WaveletDecomposition1D<typename Derived::Scalar> atrous_1d(const Eigen::MatrixBase<Derived>& signal,
                                                           int levels) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(signal.size());
  detail::check_levels(levels, n, "atrous_1d");

  WaveletDecomposition1D<Scalar> out;
  out.details.reserve(levels);
  Vector current = signal;
  Vector next(n);
  for (int j = 0; j < levels; ++j) {
    detail::smooth_line(current.data(), next.data(), n, 1, 1 << j);
    out.details.emplace_back(current - next);
    current.swap(next);
  }
  out.smooth = std::move(current);
  return out;
}

/// Redundant B3-spline a trous transform of an image, separable rows then columns,
/// with mirror boundaries. Exactly additive: input = smooth + sum(scales).
template <typename Scalar>
WaveletDecomposition<Scalar> atrous_2d(const Image<Scalar>& img, int levels) {
  const int w = img.width();
  const int h = img.height();
  detail::check_levels(levels, std::min(w, h), "atrous_2d");

  using Array = typename Image<Scalar>::Array;
  WaveletDecomposition<Scalar> out;
  out.scales.reserve(levels);
  Array current = img.pixels();
  Array rows(h, w);
  Array next(h, w);
  for (int j = 0; j < levels; ++j) {
    const int step = 1 << j;
    for (int y = 0; y < h; ++y) {
      detail::smooth_line(current.data() + static_cast<std::ptrdiff_t>(y) * w,
                          rows.data() + static_cast<std::ptrdiff_t>(y) * w, w, 1, step);
    }
    // Column pass as a combination of whole rows keeps memory access contiguous.
    for (int y = 0; y < h; ++y) {
      next.row(y) = static_cast<Scalar>(kB3Taps[0]) * rows.row(reflect_index(y - 2 * step, h)) +
                    static_cast<Scalar>(kB3Taps[1]) * rows.row(reflect_index(y - step, h)) +
                    static_cast<Scalar>(kB3Taps[2]) * rows.row(y) +
                    static_cast<Scalar>(kB3Taps[3]) * rows.row(reflect_index(y + step, h)) +
                    static_cast<Scalar>(kB3Taps[4]) * rows.row(reflect_index(y + 2 * step, h));
    }
    out.scales.emplace_back(Array(current - next));
    current.swap(next);
  }
  out.smooth = Image<Scalar>(std::move(current));
  return out;
}

}  // namespace mrgrade
