#pragma once

// Live mode: stages run as external processes, inference is driven over a
// streaming completion endpoint, and power comes from the GPU.

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "lcbench/adapters.hpp"
#include "lcbench/keyed_text.hpp"
#include "lcbench/sweep.hpp"

namespace lcbench {

// Keys read from the plan file (templated with {model_id} {family} {tier}
// {task} {adaptation} {run} {config_id}):
//   command.adapt, command.compress, command.serve,
//   endpoint, max_tokens, prompts (file, one prompt per line),
//   scores (file of `<config_id> <run> <pass scores...>` lines),
//   load_timeout_ms
struct LiveWorkloadConfig {
  std::string adapt_command;
  std::string compress_command;
  std::string serve_command;
  std::string endpoint = "http://127.0.0.1:8000/v1/completions";
  int max_tokens = 128;
  Millis load_timeout_ms = 600000;
  Millis request_timeout_ms = 60000;
  std::vector<std::string> prompts;
  std::map<std::pair<std::string, int>, std::vector<double>> scores;
};

LiveWorkloadConfig ParseLiveWorkloadConfig(const KeyedText& text);

std::string ExpandTemplate(const std::string& pattern, const Configuration& config, int run_index);

class LiveWorkload final : public Workload {
 public:
  explicit LiveWorkload(LiveWorkloadConfig config) : config_(std::move(config)) {}
  ~LiveWorkload() override;

  bool supports(Adaptation a) const override;
  void adapt(const Configuration& config, int run_index, TraceRecorder& recorder) override;
  void load(const Configuration& config, int run_index, TraceRecorder& recorder) override;
  InferenceOutcome infer(const Configuration& config, int run_index, int n_requests, int passes,
                         TraceRecorder& recorder) override;
  void teardown(const Configuration& config, int run_index) override;

 private:
  LiveWorkloadConfig config_;
  std::unique_ptr<Subprocess> server_;
  std::thread reader_;
  std::mutex mu_;
  std::condition_variable ready_cv_;
  bool ready_ = false;
  bool closed_ = false;  // server stdout reached end of stream
};

class LiveProviderSource final : public ProviderSource {
 public:
  explicit LiveProviderSource(unsigned device_index = 0) : device_index_(device_index) {}
  TelemetrySession open(const Configuration& config, int run_index, Millis period) override;

 private:
  unsigned device_index_;
};

}  // namespace lcbench
