#pragma once

// Minimal `key = value` configuration files. `#` starts a comment; blank
// lines are ignored; keys are unique.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcbench {

class KeyedText {
 public:
  static KeyedText Parse(std::string_view text);
  static KeyedText Load(const std::filesystem::path& path);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  double require_double(std::string_view key) const;
  long long get_int(std::string_view key, long long fallback) const;

  // Comma-separated list value; empty when the key is absent.
  std::vector<std::string> get_list(std::string_view key) const;

  // Entries whose key starts with `prefix`, with the prefix stripped.
  std::vector<std::pair<std::string, std::string>> with_prefix(std::string_view prefix) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string Trim(std::string_view s);

}  // namespace lcbench
