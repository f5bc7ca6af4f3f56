#include "lcbench/live.hpp"

#include <sstream>

#include "lcbench/text.hpp"
#include "lcbench/trace_io.hpp"

namespace lcbench {
namespace {

void ReplaceAll(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string ExpandTemplate(const std::string& pattern, const Configuration& config, int run_index) {
  std::string out = pattern;
  ReplaceAll(out, "{model_id}", config.model_id);
  ReplaceAll(out, "{family}", ToString(config.family));
  ReplaceAll(out, "{tier}", ToString(config.tier));
  ReplaceAll(out, "{task}", ToString(config.task));
  ReplaceAll(out, "{adaptation}", ToString(config.adaptation));
  ReplaceAll(out, "{run}", std::to_string(run_index));
  ReplaceAll(out, "{config_id}", config.id());
  return out;
}

LiveWorkloadConfig ParseLiveWorkloadConfig(const KeyedText& text) {
  LiveWorkloadConfig c;
  c.adapt_command = text.get("command.adapt").value_or("");
  c.compress_command = text.get("command.compress").value_or("");
  c.serve_command = text.require("command.serve");
  c.endpoint = text.get("endpoint").value_or(c.endpoint);
  c.max_tokens = static_cast<int>(text.get_int("max_tokens", c.max_tokens));
  c.load_timeout_ms = text.get_int("load_timeout_ms", c.load_timeout_ms);
  c.request_timeout_ms = text.get_int("request_timeout_ms", c.request_timeout_ms);
  if (auto prompts = text.get("prompts")) {
    std::istringstream in(ReadFile(*prompts));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) c.prompts.push_back(line);
    }
  }
  if (auto scores = text.get("scores")) {
    std::istringstream in(ReadFile(*scores));
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream words(line);
      std::string id;
      int run = 0;
      if (!(words >> id >> run)) continue;
      std::vector<double> passes;
      std::string w;
      while (words >> w) passes.push_back(ParseDouble(w));
      c.scores[{id, run}] = std::move(passes);
    }
  }
  if (c.prompts.empty()) c.prompts.push_back("Summarize the benefits of energy-efficient model serving.");
  return c;
}

LiveWorkload::~LiveWorkload() {
  if (server_) {
    server_->terminate();
    server_->wait();
  }
  if (reader_.joinable()) reader_.join();
}

bool LiveWorkload::supports(Adaptation a) const {
  if (config_.adapt_command.empty()) return false;
  return a != Adaptation::LoRA_INT4_PTQ || !config_.compress_command.empty();
}

void LiveWorkload::adapt(const Configuration& config, int run_index, TraceRecorder& recorder) {
  RunStageProcess(ExpandTemplate(config_.adapt_command, config, run_index), Stage::Adaptation, recorder);
  if (config.adaptation == Adaptation::LoRA_INT4_PTQ) {
    RunStageProcess(ExpandTemplate(config_.compress_command, config, run_index), Stage::Compression, recorder);
  }
}

void LiveWorkload::load(const Configuration& config, int run_index, TraceRecorder& recorder) {
  ready_ = false;
  closed_ = false;
  recorder.mark_stage_now(Stage::Load, Edge::Begin);
  server_ = std::make_unique<Subprocess>(ExpandTemplate(config_.serve_command, config, run_index));
  reader_ = std::thread([this] {
    // Drain the server's stdout for its lifetime; a Load end marker
    // signals readiness.
    while (auto line = server_->read_line()) {
      if (!IsMarkerLine(*line)) continue;
      try {
        const auto m = ParseMarker(*line);
        if (m.stage == Stage::Load && m.edge == Edge::End) {
          std::lock_guard lock(mu_);
          ready_ = true;
          ready_cv_.notify_all();
        }
      } catch (const MarkerError&) {
      }
    }
    std::lock_guard lock(mu_);
    closed_ = true;
    ready_cv_.notify_all();
  });
  std::unique_lock lock(mu_);
  const bool ok = ready_cv_.wait_for(lock, std::chrono::milliseconds(config_.load_timeout_ms),
                                     [&] { return ready_ || closed_; });
  if (!ok || !ready_) throw StageError("serving engine did not report Load end for " + config.id());
  lock.unlock();
  recorder.mark_stage_now(Stage::Load, Edge::End);
}

InferenceOutcome LiveWorkload::infer(const Configuration& config, int run_index, int n_requests, int passes,
                                     TraceRecorder& recorder) {
  HttpCompletionTransport transport(config_.endpoint, config_.request_timeout_ms);
  InferenceOutcome out;
  recorder.mark_stage_now(Stage::Inference, Edge::Begin);
  for (int i = 0; i < n_requests; ++i) {
    const auto& prompt = config_.prompts[static_cast<std::size_t>(i) % config_.prompts.size()];
    auto outcome = StreamInference(transport, {config.model_id, prompt, config_.max_tokens}, recorder.clock());
    if (!outcome.failed) out.requests.push_back(std::move(outcome.timing));
  }
  recorder.mark_stage_now(Stage::Inference, Edge::End);
  if (auto it = config_.scores.find({config.id(), run_index}); it != config_.scores.end()) {
    out.pass_scores = it->second;
  } else {
    // Unscored run: task scores are ingested separately.
    out.pass_scores.assign(static_cast<std::size_t>(passes), 0.0);
  }
  return out;
}

void LiveWorkload::teardown(const Configuration&, int) {
  if (server_) {
    server_->terminate();
    server_->wait();
  }
  if (reader_.joinable()) reader_.join();
  server_.reset();
}

TelemetrySession LiveProviderSource::open(const Configuration&, int, Millis) {
  TelemetrySession s;
  s.provider = std::make_unique<LiveGpuProvider>(device_index_);
  s.clock = std::make_unique<SteadyClock>();
  return s;
}

}  // namespace lcbench
