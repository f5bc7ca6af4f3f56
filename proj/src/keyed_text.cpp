#include "lcbench/keyed_text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lcbench/types.hpp"

namespace lcbench {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

KeyedText KeyedText::Parse(std::string_view text) {
  KeyedText out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error("line " + std::to_string(line_no) + ": expected 'key = value', got '" + trimmed + "'");
    }
    std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    std::string value = Trim(std::string_view(trimmed).substr(eq + 1));
    if (key.empty()) throw Error("line " + std::to_string(line_no) + ": empty key");
    if (out.contains(key)) throw Error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    out.entries_.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyedText KeyedText::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

bool KeyedText::contains(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KeyedText::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyedText::require(std::string_view key) const {
  if (auto v = get(key)) return *v;
  throw Error("missing key '" + std::string(key) + "'");
}

namespace {

double ToDouble(std::string_view key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error("key '" + std::string(key) + "': not a number: '" + v + "'");
  }
  return out;
}

}  // namespace

double KeyedText::get_double(std::string_view key, double fallback) const {
  if (auto v = get(key)) return ToDouble(key, *v);
  return fallback;
}

double KeyedText::require_double(std::string_view key) const { return ToDouble(key, require(key)); }

long long KeyedText::get_int(std::string_view key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw Error("key '" + std::string(key) + "': not an integer: '" + *v + "'");
  }
  return out;
}

std::vector<std::string> KeyedText::get_list(std::string_view key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v) return out;
  std::string_view rest = *v;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string item = Trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> KeyedText::with_prefix(std::string_view prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : entries_) {
    if (k.size() > prefix.size() && std::string_view(k).substr(0, prefix.size()) == prefix) {
      out.emplace_back(k.substr(prefix.size()), v);
    }
  }
  return out;
}

}  // namespace lcbench
