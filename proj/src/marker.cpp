#include <algorithm>
#include <cctype>

#include "lcbench/adapters.hpp"
#include "lcbench/text.hpp"

namespace lcbench {
namespace {

bool ValidKey(std::string_view k) {
  if (k.empty()) return false;
  const auto head = static_cast<unsigned char>(k.front());
  if (!(std::isalpha(head) || k.front() == '_')) return false;
  return std::all_of(k.begin() + 1, k.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.' || c == '-';
  });
}

bool CanonicalUnsigned(std::string_view s) {
  if (s.empty() || s.size() > 18) return false;
  if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
  return s.size() == 1 || s.front() != '0';
}

}  // namespace

std::optional<std::string> MarkerMessage::aux_value(std::string_view key) const {
  for (const auto& [k, v] : aux) {
    if (k == key) return v;
  }
  return std::nullopt;
}

bool IsMarkerLine(std::string_view line) { return line == "MARK" || line.substr(0, 5) == "MARK "; }

MarkerMessage ParseMarker(std::string_view line) {
  auto fail = [&](const std::string& why) {
    return MarkerError("malformed marker line '" + std::string(line) + "': " + why);
  };
  const auto tokens = SplitSpaces(line);
  if (tokens.size() < 4 || tokens[0] != "MARK") throw fail("expected MARK <stage> <begin|end> <t_ms>");
  MarkerMessage m;
  try {
    m.stage = ParseStage(tokens[1]);
    m.edge = ParseEdge(tokens[2]);
  } catch (const Error& e) {
    throw fail(e.what());
  }
  if (!CanonicalUnsigned(tokens[3])) throw fail("timestamp must be a non-negative integer");
  m.t = ParseInt(tokens[3]);
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) throw fail("aux field '" + std::string(tokens[i]) + "' is not k=v");
    const auto key = tokens[i].substr(0, eq);
    const auto value = tokens[i].substr(eq + 1);
    if (!ValidKey(key)) throw fail("invalid aux key '" + std::string(key) + "'");
    if (value.empty()) throw fail("empty aux value for '" + std::string(key) + "'");
    m.aux.emplace_back(std::string(key), std::string(value));
  }
  return m;
}

std::string FormatMarker(const MarkerMessage& m) {
  std::string out = "MARK ";
  out.append(ToString(m.stage)).append(" ").append(ToString(m.edge)).append(" ").append(std::to_string(m.t));
  for (const auto& [k, v] : m.aux) out.append(" ").append(k).append("=").append(v);
  return out;
}

double ProbeVram(const TelemetryProvider& provider, const TelemetryTrace& trace) {
  if (!provider.capabilities().supports_memory) {
    throw Error("provider " + provider.device() + " does not support memory queries");
  }
  const auto span = trace.find_span(Stage::Inference);
  if (!span) throw Error("trace has no Inference span");
  std::optional<double> peak;
  for (const auto& m : trace.memory) {
    if (m.t <= span->start) {
      peak = m.gb;  // value held at span start
    } else if (m.t <= span->end) {
      peak = std::max(peak.value_or(m.gb), m.gb);
    }
  }
  if (!peak) throw Error("no memory samples cover the Inference span");
  return *peak;
}

}  // namespace lcbench
