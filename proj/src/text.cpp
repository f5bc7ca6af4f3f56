#include "lcbench/text.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "lcbench/types.hpp"

namespace lcbench {

std::string FormatShortest(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string FormatFixed(double v, int decimals) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw Error("cannot format number");
  std::string out(buf.data(), ptr);
  // Avoid "-0.0" for values that round to zero.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

double ParseDouble(std::string_view token) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error("not a number: '" + std::string(token) + "'");
  }
  return out;
}

std::int64_t ParseInt(std::string_view token) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error("not an integer: '" + std::string(token) + "'");
  }
  return out;
}

std::vector<std::string_view> SplitSpaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto sp = line.find(' ', pos);
    if (sp == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, sp - pos));
    pos = sp + 1;
  }
  return out;
}

}  // namespace lcbench
