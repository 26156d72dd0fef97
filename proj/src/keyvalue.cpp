#include "mrgrade/keyvalue.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mrgrade/image.hpp"

namespace mrgrade {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

template <typename T>
T convert(const std::string& text, const std::string& key, const std::string& source) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(source + ": bad value '" + text + "' for key '" + key + "'");
  }
  return value;
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": empty key");
    if (kv.values_.count(key)) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = value;
    kv.order_.push_back(key);
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> KeyValues::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return convert<int>(*v, key, source_);
}

std::optional<double> KeyValues::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return convert<double>(*v, key, source_);
}

std::optional<bool> KeyValues::get_bool(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::string lower = *v;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "yes" || lower == "1") return true;
  if (lower == "false" || lower == "no" || lower == "0") return false;
  throw ParseError(source_ + ": bad boolean '" + *v + "' for key '" + key + "'");
}

std::optional<std::vector<int>> KeyValues::get_int_list(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::vector<int> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(convert<int>(trim(item), key, source_));
  return out;
}

void KeyValues::require_known(const std::vector<std::string>& known) const {
  for (const auto& key : order_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError(source_ + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace mrgrade
