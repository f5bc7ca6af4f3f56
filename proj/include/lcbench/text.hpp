#pragma once

// Number formatting and token helpers for the line-oriented file formats.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lcbench {

// Shortest decimal form that parses back to the identical double.
std::string FormatShortest(double v);

// Fixed-point with `decimals` digits after the point.
std::string FormatFixed(double v, int decimals);

// Strict parsers: the whole token must be consumed; throw Error otherwise.
double ParseDouble(std::string_view token);
std::int64_t ParseInt(std::string_view token);

// Splits on single spaces; empty tokens (double spaces) are preserved so
// strict grammars can reject them.
std::vector<std::string_view> SplitSpaces(std::string_view line);

}  // namespace lcbench
