#pragma once

// Per-request latency and sustained throughput.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcbench/types.hpp"

namespace lcbench {

struct LatencyStats {
  LatencySummary ttft_ms;
  LatencySummary itl_ms;        // per-request median gap, reduced over requests
  LatencySummary itl_mean_ms;   // per-request mean gap, reduced over requests
  double throughput_tok_s = 0.0;
  int n_requests = 0;
  int n_itl = 0;                // requests with at least two tokens

  bool operator==(const LatencyStats&) const = default;
};

/// Throws Error describing the first broken RequestTiming invariant.
void CheckRequestTiming(const RequestTiming& r);

double Ttft(const RequestTiming& r);

// Median gap between consecutive token timestamps; needs >= 2 tokens.
double Itl(const RequestTiming& r);
double ItlMeanGap(const RequestTiming& r);

/// Total streamed tokens divided by the window duration in seconds.
double Throughput(std::span<const RequestTiming> batch, const StageSpan& window);

/// Median/p95 (nearest rank)/mean/sample-std of TTFT and ITL over a batch.
LatencyStats AggregateLatency(std::span<const RequestTiming> batch, const StageSpan& window);

// Request-timing file: one line per request, `R <submit> <first_token> <n> <t1> ... <tn>`.
std::string FormatRequestLine(const RequestTiming& r);
RequestTiming ParseRequestLine(std::string_view line);
std::string WriteRequests(std::span<const RequestTiming> batch);
std::vector<RequestTiming> ParseRequests(std::string_view text);
std::vector<RequestTiming> LoadRequests(const std::filesystem::path& path);

}  // namespace lcbench
