#pragma once

// Trace file format:
//
//   LCTRACE 1 nominal_period_ms=<n> device_memory_gb=<x> jitter_tolerance_ms=<n>
//       jitter_rejected=<n> jitter_gaps=<n> [idle_baseline_w=<x>]      (one line)
//   S <t_ms> <watts>                 power sample
//   V <t_ms> <gb>                    allocated device memory sample
//   M <stage> <begin|end> <t_ms>     stage marker
//   E <message>                      recording error annotation
//
// Lines are emitted in time order; at equal times span ends precede
// samples, which precede span begins. Numbers use the shortest decimal
// form that round-trips, so write(parse(write(t))) is byte-identical.

#include <filesystem>
#include <string>
#include <string_view>

#include "lcbench/types.hpp"

namespace lcbench {

std::string WriteTrace(const TelemetryTrace& trace);
TelemetryTrace ParseTrace(std::string_view text);

void SaveTrace(const std::filesystem::path& path, const TelemetryTrace& trace);
TelemetryTrace LoadTrace(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace lcbench
