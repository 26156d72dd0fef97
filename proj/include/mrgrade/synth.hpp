#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mrgrade/image.hpp"

namespace mrgrade {

struct Disks {
  double radius_mean = 4.0;
  double radius_sd = 0.0;
  int count = 0;
};

/// Full-frame straight lines; `angle_deg` is measured from the horizontal.
struct Lines {
  double angle_deg = 0.0;
  int count = 0;
  int thickness = 1;
};

struct Blobs {
  double scale = 4.0;
  int count = 0;
};

using Primitive = std::variant<Disks, Lines, Blobs>;

/// Each component is rendered with its count scaled by its proportion.
struct Mixture {
  std::vector<std::pair<double, Primitive>> components;
};

using TextureSpec = std::variant<Disks, Lines, Blobs, Mixture>;

inline constexpr double kBackgroundLevel = 128.0;
inline constexpr double kLineLevel = 255.0;

/// Throws InvalidInput for negative counts, nonpositive sizes or proportions
/// that do not sum to 1.
void validate(const TextureSpec& spec);

/// Renders the primitives over a mid-grey background. A pure function of
/// (spec, size, seed).
ImageGrid synth_texture(const TextureSpec& spec, int width, int height, std::uint64_t seed);

/// Parses the textual descriptor used in dataset files, e.g.
///   disks(6, 1.5, 300)
///   lines(45, 10, 2)
///   blobs(8, 40)
///   mixture(0.5 * disks(4, 1, 200) + 0.5 * disks(12, 2, 40))
TextureSpec parse_texture(std::string_view text);

std::string to_string(const TextureSpec& spec);

}  // namespace mrgrade
