#pragma once

// Power telemetry: providers, the concurrent trace recorder, stage marking,
// and energy integration over stage spans.

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>

#include "lcbench/types.hpp"

namespace lcbench {

inline constexpr Millis kDefaultPeriodMs = 100;
inline constexpr Millis kMinIdleSpanMs = 5000;

/// Monotonic time source shared by a trace's sampler and its markers.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() const = 0;
  virtual void sleep_until(Millis t) = 0;
};

/// std::chrono::steady_clock with its epoch at construction.
class SteadyClock final : public Clock {
 public:
  SteadyClock();
  Millis now() const override;
  void sleep_until(Millis t) override;

 private:
  std::chrono::steady_clock::time_point epoch_;
};

/// Deterministic clock for replay and tests: sleeping advances time instantly.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Millis start = 0) : now_(start) {}
  Millis now() const override { return now_.load(); }
  void sleep_until(Millis t) override;
  void advance(Millis dt) { now_.fetch_add(dt); }

 private:
  std::atomic<Millis> now_;
};

struct ProviderCapabilities {
  Millis sampling_floor_ms = 1;
  double device_memory_gb = 0.0;
  bool supports_memory = false;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Source of instantaneous device power. poll() must return within one
/// nominal period; it throws ProviderError when the device cannot be read.
class TelemetryProvider {
 public:
  virtual ~TelemetryProvider() = default;

  virtual std::string device() const = 0;
  virtual ProviderCapabilities capabilities() const = 0;

  // `now` is the sampler clock reading; live providers ignore it.
  virtual double poll(Millis now) = 0;

  // Allocated device memory in GB, for providers that support it.
  virtual std::optional<double> poll_memory_gb(Millis /*now*/) { return std::nullopt; }

  // Finite providers (replay) report when their stream has ended.
  virtual bool finite() const { return false; }
  virtual bool exhausted(Millis /*now*/) const { return false; }
};

/// Streams a stored trace: power and memory are held from the latest
/// stored sample at or before the polled time.
class ReplayProvider final : public TelemetryProvider {
 public:
  explicit ReplayProvider(TelemetryTrace trace, std::string device = "replay0");

  // Constant power for `duration` at `period` spacing starting at t = 0.
  static ReplayProvider Constant(double watts, Millis duration, Millis period = kDefaultPeriodMs);

  std::string device() const override { return device_; }
  ProviderCapabilities capabilities() const override;
  double poll(Millis now) override;
  std::optional<double> poll_memory_gb(Millis now) override;
  bool finite() const override { return true; }
  bool exhausted(Millis now) const override;

  const TelemetryTrace& source() const { return trace_; }

  // A clock positioned so that a sampler with the given period polls
  // exactly at the stored sample times when they are evenly spaced.
  VirtualClock MakeClock(Millis period) const;

 private:
  TelemetryTrace trace_;
  std::string device_;
};

/// NVIDIA management library (NVML) backed provider, loaded at runtime.
/// Construction throws ProviderError when the library or device is absent.
class LiveGpuProvider final : public TelemetryProvider {
 public:
  explicit LiveGpuProvider(unsigned device_index = 0);
  ~LiveGpuProvider() override;
  LiveGpuProvider(const LiveGpuProvider&) = delete;
  LiveGpuProvider& operator=(const LiveGpuProvider&) = delete;

  std::string device() const override;
  ProviderCapabilities capabilities() const override;
  double poll(Millis now) override;
  std::optional<double> poll_memory_gb(Millis now) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Turns begin/end markers into closed, non-overlapping StageSpans.
class SpanBuilder {
 public:
  void mark(Stage stage, Edge edge, Millis t);

  const std::vector<StageSpan>& spans() const { return spans_; }
  std::optional<Stage> open_stage() const;
  std::optional<Millis> last_time() const { return last_t_; }

 private:
  struct Open {
    Stage stage;
    Millis start;
  };
  std::vector<StageSpan> spans_;
  std::optional<Open> open_;
  std::optional<Millis> last_t_;
};

/// Samples a provider on a fixed cadence while workload code marks stages.
///
/// The sampling loop either runs in the caller (run) or in a dedicated
/// thread (start). mark_stage may be called from any thread.
class TraceRecorder {
 public:
  TraceRecorder(TelemetryProvider& provider, Millis period, Clock& clock);
  ~TraceRecorder();
  TraceRecorder(const TraceRecorder&) = delete;
  TraceRecorder& operator=(const TraceRecorder&) = delete;

  void mark_stage(Stage stage, Edge edge, Millis t);
  // Marks at the current clock reading, clamped so it never precedes the
  // previous marker and never closes a span at its own start.
  void mark_stage_now(Stage stage, Edge edge);

  Clock& clock() { return clock_; }
  Millis period() const { return period_; }

  // Unbounded (live) providers are also sampled at the start instant and
  // once more when finishing.
  void run(std::stop_token stop);
  void start();

  // Stops sampling (finite providers are drained instead) and returns the
  // completed trace. Throws Error("empty trace") when no sample was taken.
  TelemetryTrace finish();

 private:
  void append_sample(Millis t, double watts, std::optional<double> memory_gb);
  // Polls once; boundary samples skip the cadence check. False on failure.
  bool sample(Millis t, bool boundary);

  TelemetryProvider& provider_;
  Millis period_;
  Clock& clock_;
  std::jthread worker_;

  mutable std::mutex mu_;
  std::vector<PowerSample> samples_;
  std::vector<MemorySample> memory_;
  SpanBuilder spans_;
  JitterFlags jitter_;
  std::optional<std::string> error_;
};

/// Records until `stop` fires or a finite provider is exhausted.
TelemetryTrace RecordTrace(TelemetryProvider& provider, Millis period, std::stop_token stop,
                           Clock& clock);

/// Convenience: replays a provider's stored trace through the sampler.
TelemetryTrace RecordReplay(ReplayProvider& provider, Millis period = kDefaultPeriodMs);

/// Trapezoidal energy in joules over `span`, interpolating power linearly
/// at the span boundaries. With subtract_idle, max(0, W - idle_baseline)
/// is integrated instead.
double IntegrateEnergy(const TelemetryTrace& trace, const StageSpan& span, bool subtract_idle = false);

/// Median power over the trace's Idle spans of at least five seconds.
double EstimateIdleBaseline(const TelemetryTrace& trace);

/// Total joules per stage summed over every span of that stage.
std::map<Stage, double> StageEnergies(const TelemetryTrace& trace, bool subtract_idle = false);

/// Mean power in fixed-width time buckets: (bucket start ms, mean W).
std::vector<std::pair<Millis, double>> BucketMeans(const TelemetryTrace& trace, Millis bucket_ms);

}  // namespace lcbench
