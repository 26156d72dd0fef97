#include "mrgrade/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mrgrade/random.hpp"

namespace mrgrade {

namespace {

void validate_primitive(const Primitive& p) {
  std::visit(
      [](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if (prim.count < 0) throw InvalidInput("primitive count must be nonnegative");
        if constexpr (std::is_same_v<T, Disks>) {
          if (!(prim.radius_mean > 0.0)) throw InvalidInput("disk radius must be positive");
          if (prim.radius_sd < 0.0) throw InvalidInput("disk radius sd must be nonnegative");
        } else if constexpr (std::is_same_v<T, Lines>) {
          if (prim.thickness < 1) throw InvalidInput("line thickness must be at least 1");
        } else {
          if (!(prim.scale > 0.0)) throw InvalidInput("blob scale must be positive");
        }
      },
      p);
}

void draw(const Disks& d, int count, ImageGrid& img, Rng& rng) {
  const int w = img.width();
  const int h = img.height();
  for (int n = 0; n < count; ++n) {
    const double cx = rng.uniform(0.0, w);
    const double cy = rng.uniform(0.0, h);
    const double r = std::max(0.5, rng.normal(d.radius_mean, d.radius_sd));
    const double level = rng.uniform(60.0, 230.0);
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        if (dx * dx + dy * dy <= r * r) img(y, x) = level;
      }
    }
  }
}

void draw(const Lines& l, int count, ImageGrid& img, Rng& rng) {
  const int w = img.width();
  const int h = img.height();
  const double theta = l.angle_deg * std::numbers::pi / 180.0;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const int cx = w / 2;
  const int cy = h / 2;
  const auto reach = static_cast<std::int64_t>(std::floor(0.5 * (std::abs(w * s) + std::abs(h * c))));
  const double half = 0.5 * l.thickness;
  for (int n = 0; n < count; ++n) {
    const double offset = static_cast<double>(rng.uniform_int(-reach, reach));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dist = -(x - cx) * s + (y - cy) * c - offset;
        if (dist >= -half && dist < half) img(y, x) = kLineLevel;
      }
    }
  }
}

void draw(const Blobs& b, int count, ImageGrid& img, Rng& rng) {
  const int w = img.width();
  const int h = img.height();
  const double reach = 4.0 * b.scale;
  for (int n = 0; n < count; ++n) {
    const double cx = rng.uniform(0.0, w);
    const double cy = rng.uniform(0.0, h);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double amp = sign * rng.uniform(40.0, 90.0);
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + reach)));
    const double inv = 1.0 / (2.0 * b.scale * b.scale);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        img(y, x) += amp * std::exp(-(dx * dx + dy * dy) * inv);
      }
    }
  }
}

void render(const Primitive& p, double proportion, ImageGrid& img, Rng& rng) {
  std::visit(
      [&](const auto& prim) {
        const int count = static_cast<int>(std::lround(proportion * prim.count));
        draw(prim, count, img, rng);
      },
      p);
}

// --- descriptor parsing ---

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("texture: expected number, got '" + std::string(s) + "'");
  }
  return v;
}

int to_count(std::string_view s) {
  const double v = to_number(s);
  if (v != std::floor(v)) throw ParseError("texture: expected integer, got '" + std::string(s) + "'");
  return static_cast<int>(v);
}

// Splits "name(a, b, c)" into name and argument list.
std::pair<std::string_view, std::string_view> call_parts(std::string_view s) {
  s = trim(s);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') {
    throw ParseError("texture: malformed term '" + std::string(s) + "'");
  }
  return {trim(s.substr(0, open)), s.substr(open + 1, s.size() - open - 2)};
}

std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  return parts;
}

Primitive parse_primitive(std::string_view text) {
  const auto [name, body] = call_parts(text);
  const auto args = split_top_level(body, ',');
  auto need = [&](std::size_t n) {
    if (args.size() != n) {
      throw ParseError("texture: " + std::string(name) + " takes " + std::to_string(n) + " arguments");
    }
  };
  if (name == "disks") {
    need(3);
    return Disks{to_number(args[0]), to_number(args[1]), to_count(args[2])};
  }
  if (name == "lines") {
    need(3);
    return Lines{to_number(args[0]), to_count(args[1]), to_count(args[2])};
  }
  if (name == "blobs") {
    need(2);
    return Blobs{to_number(args[0]), to_count(args[1])};
  }
  throw ParseError("texture: unknown primitive '" + std::string(name) + "'");
}

std::string primitive_string(const Primitive& p) {
  std::ostringstream os;
  std::visit(
      [&](const auto& prim) {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Disks>) {
          os << "disks(" << prim.radius_mean << ", " << prim.radius_sd << ", " << prim.count << ")";
        } else if constexpr (std::is_same_v<T, Lines>) {
          os << "lines(" << prim.angle_deg << ", " << prim.count << ", " << prim.thickness << ")";
        } else {
          os << "blobs(" << prim.scale << ", " << prim.count << ")";
        }
      },
      p);
  return os.str();
}

}  // namespace

void validate(const TextureSpec& spec) {
  if (const auto* mix = std::get_if<Mixture>(&spec)) {
    if (mix->components.empty()) throw InvalidInput("mixture needs at least one component");
    double total = 0.0;
    for (const auto& [p, prim] : mix->components) {
      if (p < 0.0) throw InvalidInput("mixture proportions must be nonnegative");
      total += p;
      validate_primitive(prim);
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("mixture proportions must sum to 1");
    return;
  }
  std::visit(
      [](const auto& prim) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(prim)>, Mixture>) validate_primitive(prim);
      },
      spec);
}

ImageGrid synth_texture(const TextureSpec& spec, int width, int height, std::uint64_t seed) {
  validate(spec);
  ImageGrid img(width, height, kBackgroundLevel);
  Rng rng(seed);
  if (const auto* mix = std::get_if<Mixture>(&spec)) {
    for (const auto& [p, prim] : mix->components) render(prim, p, img, rng);
  } else {
    std::visit(
        [&](const auto& prim) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(prim)>, Mixture>) {
            render(Primitive{prim}, 1.0, img, rng);
          }
        },
        spec);
  }
  img.pixels() = img.pixels().cwiseMax(0.0).cwiseMin(255.0);
  return img;
}

TextureSpec parse_texture(std::string_view text) {
  text = trim(text);
  TextureSpec spec;
  if (text.starts_with("mixture")) {
    const auto [name, body] = call_parts(text);
    if (name != "mixture") throw ParseError("texture: unknown descriptor '" + std::string(name) + "'");
    Mixture mix;
    for (auto term : split_top_level(body, '+')) {
      const auto star = term.find('*');
      if (star == std::string_view::npos) {
        throw ParseError("texture: mixture term needs 'proportion * primitive'");
      }
      mix.components.emplace_back(to_number(term.substr(0, star)),
                                  parse_primitive(term.substr(star + 1)));
    }
    spec = std::move(mix);
  } else {
    std::visit([&](auto&& prim) { spec = prim; }, parse_primitive(text));
  }
  try {
    validate(spec);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("texture: ") + e.what());
  }
  return spec;
}

std::string to_string(const TextureSpec& spec) {
  if (const auto* mix = std::get_if<Mixture>(&spec)) {
    std::string out = "mixture(";
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      if (i) out += " + ";
      std::ostringstream p;
      p << mix->components[i].first;
      out += p.str() + " * " + primitive_string(mix->components[i].second);
    }
    return out + ")";
  }
  std::string out;
  std::visit(
      [&](const auto& prim) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(prim)>, Mixture>) {
          out = primitive_string(prim);
        }
      },
      spec);
  return out;
}

}  // namespace mrgrade
