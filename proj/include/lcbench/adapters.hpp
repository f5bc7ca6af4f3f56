#pragma once

// Boundary between the harness and real or simulated workloads: the
// stage-marker line protocol, external stage processes, the streaming
// completion client, and the device-memory probe.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lcbench/telemetry.hpp"
#include "lcbench/types.hpp"

namespace lcbench {

// ---------------------------------------------------------------------------
// Marker protocol: `MARK <stage> <begin|end> <t_ms> [k=v ...]`
//
// Tokens are separated by single spaces; t_ms is a non-negative decimal
// integer without leading zeros; aux keys match [A-Za-z_][A-Za-z0-9_.-]*
// and values are non-empty and contain no spaces.

struct MarkerMessage {
  Stage stage = Stage::Idle;
  Edge edge = Edge::Begin;
  Millis t = 0;
  std::vector<std::pair<std::string, std::string>> aux;

  std::optional<std::string> aux_value(std::string_view key) const;
  bool operator==(const MarkerMessage&) const = default;
};

class MarkerError : public Error {
 public:
  using Error::Error;
};

bool IsMarkerLine(std::string_view line);
MarkerMessage ParseMarker(std::string_view line);
std::string FormatMarker(const MarkerMessage& m);

// ---------------------------------------------------------------------------
// External stage processes

class StageError : public Error {
 public:
  using Error::Error;
};

/// A child process running `/bin/sh -c <command>` with stdout piped to us.
class Subprocess {
 public:
  explicit Subprocess(const std::string& command);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Next stdout line without the newline; nullopt at end of stream.
  std::optional<std::string> read_line();

  // Exit status (128 + signal for signalled children). Blocks.
  int wait();
  // SIGTERM to the child's whole process group.
  void terminate();
  bool running() const { return pid_ > 0 && !exited_; }

 private:
  int pid_ = -1;
  int fd_ = -1;
  bool exited_ = false;
  int status_ = 0;
  std::string buffer_;
};

struct StageProcessResult {
  int exit_status = 0;
  std::vector<MarkerMessage> markers;  // as emitted by the workload
  bool wrapped = false;                // harness supplied begin/end
  std::vector<std::string> output;     // non-marker stdout lines
};

/// Runs an external workload for `stage`, applying every marker it prints
/// to the recorder. Workload timestamps are mapped onto the trace clock by
/// the offset observed at the first marker. A marker-silent process is
/// wrapped in harness-timed begin/end markers for `stage`.
///
/// Throws StageError on a malformed marker line (quoted in the message) or
/// a nonzero exit status.
StageProcessResult RunStageProcess(const std::string& command, Stage stage, TraceRecorder& recorder);

// ---------------------------------------------------------------------------
// Streaming completion client

struct CompletionRequest {
  std::string model;
  std::string prompt;
  int max_tokens = 128;
};

class StreamingRequiredError : public Error {
 public:
  StreamingRequiredError() : Error("streaming required") {}
};

class RequestTimeoutError : public Error {
 public:
  using Error::Error;
};

/// Delivers the content chunks of one streamed completion in arrival order.
class CompletionTransport {
 public:
  virtual ~CompletionTransport() = default;
  virtual void stream(const CompletionRequest& request, const std::function<void(std::string_view)>& on_chunk) = 0;
};

/// OpenAI-compatible HTTP endpoint with server-sent-event streaming.
/// Paths ending in `chat/completions` use the chat message shape.
class HttpCompletionTransport final : public CompletionTransport {
 public:
  explicit HttpCompletionTransport(std::string endpoint_url, Millis timeout_ms = 60000);
  void stream(const CompletionRequest& request, const std::function<void(std::string_view)>& on_chunk) override;

 private:
  std::string base_;
  std::string path_;
  Millis timeout_ms_;
};

/// In-process endpoint with a fixed chunk schedule on a virtual clock:
/// the first chunk arrives `first_delay` ms after the request, then one
/// chunk every `spacing` ms.
class ScriptedEndpoint final : public CompletionTransport {
 public:
  ScriptedEndpoint(VirtualClock& clock, Millis first_delay, Millis spacing, int chunks);
  void stream(const CompletionRequest& request, const std::function<void(std::string_view)>& on_chunk) override;

 private:
  VirtualClock& clock_;
  Millis first_delay_;
  Millis spacing_;
  int chunks_;
};

struct StreamOutcome {
  RequestTiming timing;
  bool failed = false;
  std::string error;
};

/// Times one streamed request: submit at send, first_token at the first
/// content chunk, one timestamp per chunk. Token count is the chunk count.
/// Timeouts and connection failures yield a failed outcome; a
/// non-streaming endpoint or zero chunks throw.
StreamOutcome StreamInference(CompletionTransport& transport, const CompletionRequest& request, Clock& clock);
StreamOutcome StreamInference(const std::string& endpoint, const std::string& prompt, int max_tokens, Clock& clock);

// ---------------------------------------------------------------------------
// Device memory

/// Peak allocated device memory (GB) over the trace's Inference span.
double ProbeVram(const TelemetryProvider& provider, const TelemetryTrace& trace);

}  // namespace lcbench
