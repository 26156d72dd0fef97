#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrgrade {

/// Plain-text `key = value` file; `#` starts a comment, blank lines are ignored.
/// Keys are case-sensitive and may appear once.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text, const std::string& source = "<string>");
  static KeyValues load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::optional<int> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<int>> get_int_list(const std::string& key) const;

  /// Keys in file order.
  const std::vector<std::string>& keys() const { return order_; }

  /// Throws ParseError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

}  // namespace mrgrade
