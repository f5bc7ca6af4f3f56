#pragma once

// Replay mode: every run is reconstructed from a stored bundle instead of
// a live GPU and serving engine.
//
// Bundle layout, per configuration (`/` in the configuration id becomes `_`):
//
//   <root>/<LLaMA_Micro_RAG_LoRA-FP16>/trace.txt     power (+ memory) trace
//   <root>/<...>/markers.txt                         MARK lines (optional when
//                                                    the trace carries M lines)
//   <root>/<...>/requests.txt                        R lines
//   <root>/<...>/scores.txt                          one score per pass
//
// A `run-<k>/` subdirectory, when present, overrides any of these files for
// run k.

#include <filesystem>
#include <map>
#include <mutex>

#include "lcbench/adapters.hpp"
#include "lcbench/sweep.hpp"

namespace lcbench {

struct ReplayBundle {
  TelemetryTrace trace;
  std::vector<MarkerMessage> markers;
  std::vector<RequestTiming> requests;
  std::vector<double> scores;
};

std::filesystem::path BundleDir(const std::filesystem::path& root, const Configuration& config);
ReplayBundle LoadBundle(const std::filesystem::path& root, const Configuration& config, int run_index);
std::vector<MarkerMessage> ParseMarkerFile(std::string_view text);
std::vector<double> ParseScores(std::string_view text);

class ReplayProviderSource final : public ProviderSource {
 public:
  explicit ReplayProviderSource(std::filesystem::path root) : root_(std::move(root)) {}
  TelemetrySession open(const Configuration& config, int run_index, Millis period) override;

 private:
  std::filesystem::path root_;
};

/// Applies a bundle's markers phase by phase and returns its requests and
/// scores. Skipped adaptation phases skip their markers too.
class ReplayWorkload final : public Workload {
 public:
  explicit ReplayWorkload(std::filesystem::path root) : root_(std::move(root)) {}

  bool supports(Adaptation) const override { return true; }
  void adapt(const Configuration& config, int run_index, TraceRecorder& recorder) override;
  void load(const Configuration& config, int run_index, TraceRecorder& recorder) override;
  InferenceOutcome infer(const Configuration& config, int run_index, int n_requests, int passes,
                         TraceRecorder& recorder) override;
  void teardown(const Configuration& config, int run_index) override;

 private:
  struct Cursor {
    ReplayBundle bundle;
    std::size_t next = 0;
  };
  Cursor& cursor(const Configuration& config, int run_index);
  void apply_through(Cursor& c, Stage until, bool include_adaptation, TraceRecorder& recorder);

  std::filesystem::path root_;
  std::map<RunKey, Cursor> cursors_;
};

}  // namespace lcbench
