#include "lcbench/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "lcbench/telemetry.hpp"
#include "lcbench/text.hpp"

namespace lcbench {
namespace {

constexpr std::string_view kMagic = "LCTRACE";
constexpr std::string_view kVersion = "1";

struct Event {
  Millis t;
  int rank;
  std::size_t seq;
  std::string line;
};

std::string StripNewlines(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

std::string WriteTrace(const TelemetryTrace& trace) {
  std::string out;
  out.append(kMagic).append(" ").append(kVersion);
  out.append(" nominal_period_ms=").append(std::to_string(trace.nominal_period));
  out.append(" device_memory_gb=").append(FormatShortest(trace.device_memory_gb));
  out.append(" jitter_tolerance_ms=").append(std::to_string(trace.jitter.tolerance_ms));
  out.append(" jitter_rejected=").append(std::to_string(trace.jitter.rejected));
  out.append(" jitter_gaps=").append(std::to_string(trace.jitter.gaps));
  if (trace.idle_baseline) out.append(" idle_baseline_w=").append(FormatShortest(*trace.idle_baseline));
  out.push_back('\n');

  std::vector<Event> events;
  std::size_t seq = 0;
  for (const auto& s : trace.samples) {
    events.push_back({s.t, 1, seq++, "S " + std::to_string(s.t) + " " + FormatShortest(s.watts)});
  }
  for (const auto& m : trace.memory) {
    events.push_back({m.t, 2, seq++, "V " + std::to_string(m.t) + " " + FormatShortest(m.gb)});
  }
  for (const auto& span : trace.spans) {
    const std::string stage(ToString(span.stage));
    events.push_back({span.start, 3, seq++, "M " + stage + " begin " + std::to_string(span.start)});
    events.push_back({span.end, 0, seq++, "M " + stage + " end " + std::to_string(span.end)});
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return std::tie(a.t, a.rank, a.seq) < std::tie(b.t, b.rank, b.seq); });
  for (const auto& e : events) out.append(e.line).push_back('\n');
  if (trace.error) out.append("E ").append(StripNewlines(*trace.error)).push_back('\n');
  return out;
}

TelemetryTrace ParseTrace(std::string_view text) {
  TelemetryTrace trace;
  SpanBuilder spans;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error("trace line " + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      const auto tokens = SplitSpaces(line);
      if (tokens.size() < 2 || tokens[0] != kMagic) throw fail("missing LCTRACE header");
      if (tokens[1] != kVersion) throw fail("unsupported trace version " + std::string(tokens[1]));
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string_view::npos) throw fail("malformed header field '" + std::string(tokens[i]) + "'");
        const auto key = tokens[i].substr(0, eq);
        const auto value = tokens[i].substr(eq + 1);
        try {
          if (key == "nominal_period_ms") {
            trace.nominal_period = ParseInt(value);
          } else if (key == "device_memory_gb") {
            trace.device_memory_gb = ParseDouble(value);
          } else if (key == "jitter_tolerance_ms") {
            trace.jitter.tolerance_ms = ParseInt(value);
          } else if (key == "jitter_rejected") {
            trace.jitter.rejected = static_cast<int>(ParseInt(value));
          } else if (key == "jitter_gaps") {
            trace.jitter.gaps = static_cast<int>(ParseInt(value));
          } else if (key == "idle_baseline_w") {
            trace.idle_baseline = ParseDouble(value);
          } else {
            throw Error("unknown header field '" + std::string(key) + "'");
          }
        } catch (const Error& e) {
          throw fail(e.what());
        }
      }
      if (trace.nominal_period <= 0) throw fail("nominal_period_ms must be positive");
      header_seen = true;
      continue;
    }
    if (line.substr(0, 2) == "E ") {
      trace.error = std::string(line.substr(2));
      continue;
    }
    const auto tokens = SplitSpaces(line);
    try {
      if (tokens[0] == "S" && tokens.size() == 3) {
        PowerSample s{ParseInt(tokens[1]), ParseDouble(tokens[2])};
        if (s.watts < 0.0) throw Error("negative power");
        if (!trace.samples.empty() && s.t <= trace.samples.back().t) throw Error("samples must be strictly time-ordered");
        trace.samples.push_back(s);
      } else if (tokens[0] == "V" && tokens.size() == 3) {
        MemorySample m{ParseInt(tokens[1]), ParseDouble(tokens[2])};
        if (!trace.memory.empty() && m.t <= trace.memory.back().t) throw Error("memory samples must be strictly time-ordered");
        trace.memory.push_back(m);
      } else if (tokens[0] == "M" && tokens.size() == 4) {
        spans.mark(ParseStage(tokens[1]), ParseEdge(tokens[2]), ParseInt(tokens[3]));
      } else {
        throw Error("unrecognized line '" + std::string(line) + "'");
      }
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  if (!header_seen) throw Error("empty trace file");
  if (auto open = spans.open_stage()) throw Error("trace ends with unclosed " + std::string(ToString(*open)) + " span");
  trace.spans = spans.spans();
  return trace;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

void SaveTrace(const std::filesystem::path& path, const TelemetryTrace& trace) { WriteFile(path, WriteTrace(trace)); }

TelemetryTrace LoadTrace(const std::filesystem::path& path) { return ParseTrace(ReadFile(path)); }

}  // namespace lcbench
