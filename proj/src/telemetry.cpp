#include "lcbench/telemetry.hpp"

#include <algorithm>
#include <cmath>

#include "lcbench/stats.hpp"

namespace lcbench {

SteadyClock::SteadyClock() : epoch_(std::chrono::steady_clock::now()) {}

Millis SteadyClock::now() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - epoch_)
      .count();
}

void SteadyClock::sleep_until(Millis t) { std::this_thread::sleep_until(epoch_ + std::chrono::milliseconds(t)); }

void VirtualClock::sleep_until(Millis t) {
  Millis cur = now_.load();
  while (cur < t && !now_.compare_exchange_weak(cur, t)) {
  }
}

// ---------------------------------------------------------------------------
// ReplayProvider

ReplayProvider::ReplayProvider(TelemetryTrace trace, std::string device)
    : trace_(std::move(trace)), device_(std::move(device)) {
  if (trace_.samples.empty()) throw Error("replay trace has no samples");
}

ReplayProvider ReplayProvider::Constant(double watts, Millis duration, Millis period) {
  if (period <= 0 || duration <= 0) throw Error("constant replay needs positive duration and period");
  TelemetryTrace t;
  t.nominal_period = period;
  for (Millis at = 0; at < duration; at += period) t.samples.push_back({at, watts});
  return ReplayProvider(std::move(t));
}

ProviderCapabilities ReplayProvider::capabilities() const {
  ProviderCapabilities caps;
  caps.sampling_floor_ms = 1;
  caps.device_memory_gb = trace_.device_memory_gb;
  caps.supports_memory = !trace_.memory.empty();
  return caps;
}

double ReplayProvider::poll(Millis now) {
  const auto& s = trace_.samples;
  auto it = std::upper_bound(s.begin(), s.end(), now, [](Millis t, const PowerSample& p) { return t < p.t; });
  if (it == s.begin()) return s.front().watts;
  return std::prev(it)->watts;
}

std::optional<double> ReplayProvider::poll_memory_gb(Millis now) {
  const auto& m = trace_.memory;
  if (m.empty()) return std::nullopt;
  auto it = std::upper_bound(m.begin(), m.end(), now, [](Millis t, const MemorySample& p) { return t < p.t; });
  if (it == m.begin()) return m.front().gb;
  return std::prev(it)->gb;
}

bool ReplayProvider::exhausted(Millis now) const { return now > trace_.samples.back().t; }

VirtualClock ReplayProvider::MakeClock(Millis period) const { return VirtualClock(trace_.samples.front().t - period); }

// ---------------------------------------------------------------------------
// SpanBuilder

std::optional<Stage> SpanBuilder::open_stage() const {
  if (open_) return open_->stage;
  return std::nullopt;
}

void SpanBuilder::mark(Stage stage, Edge edge, Millis t) {
  if (last_t_ && t < *last_t_) {
    throw Error("marker time " + std::to_string(t) + " precedes previous marker at " + std::to_string(*last_t_));
  }
  if (edge == Edge::Begin) {
    if (open_) {
      if (open_->stage == stage) throw Error("begin " + std::string(ToString(stage)) + " while already open");
      throw Error("overlapping spans: " + std::string(ToString(stage)) + " begins inside open " +
                  std::string(ToString(open_->stage)));
    }
    if (!spans_.empty() && t < spans_.back().end) throw Error("overlapping spans");
    open_ = Open{stage, t};
  } else {
    if (!open_ || open_->stage != stage) {
      throw Error("end " + std::string(ToString(stage)) + " without begin");
    }
    if (t <= open_->start) throw Error("span " + std::string(ToString(stage)) + " must end after it starts");
    spans_.push_back({stage, open_->start, t});
    open_.reset();
  }
  last_t_ = t;
}

// ---------------------------------------------------------------------------
// TraceRecorder

TraceRecorder::TraceRecorder(TelemetryProvider& provider, Millis period, Clock& clock)
    : provider_(provider), period_(period), clock_(clock) {
  if (period <= 0) throw Error("sampling period must be positive");
  const auto floor = provider.capabilities().sampling_floor_ms;
  if (period < floor) {
    throw Error("sampling period " + std::to_string(period) + " ms below provider floor " + std::to_string(floor) +
                " ms");
  }
  jitter_.tolerance_ms = period / 2;
}

TraceRecorder::~TraceRecorder() = default;

void TraceRecorder::mark_stage(Stage stage, Edge edge, Millis t) {
  std::lock_guard lock(mu_);
  spans_.mark(stage, edge, t);
}

void TraceRecorder::mark_stage_now(Stage stage, Edge edge) {
  std::lock_guard lock(mu_);
  Millis t = clock_.now();
  // Never behind an earlier (possibly workload-timed) marker; spans last
  // at least 1 ms.
  if (const auto last = spans_.last_time()) t = std::max(t, *last + (edge == Edge::End ? 1 : 0));
  spans_.mark(stage, edge, t);
}

void TraceRecorder::append_sample(Millis t, double watts, std::optional<double> memory_gb) {
  std::lock_guard lock(mu_);
  if (!samples_.empty()) {
    const Millis interval = t - samples_.back().t;
    if (interval < period_ - jitter_.tolerance_ms) {
      ++jitter_.rejected;
      return;
    }
    if (interval > 3 * period_) ++jitter_.gaps;
  }
  samples_.push_back({t, watts});
  if (memory_gb) memory_.push_back({t, *memory_gb});
}

bool TraceRecorder::sample(Millis t, bool boundary) {
  double watts = 0.0;
  std::optional<double> memory;
  try {
    watts = provider_.poll(t);
    if (!(watts >= 0.0) || !std::isfinite(watts)) throw ProviderError("invalid power reading");
    memory = provider_.poll_memory_gb(t);
  } catch (const std::exception& e) {
    std::lock_guard lock(mu_);
    error_ = "provider failure at t=" + std::to_string(t) + ": " + e.what();
    return false;
  }
  if (boundary) {
    std::lock_guard lock(mu_);
    if (samples_.empty() || t > samples_.back().t) {
      samples_.push_back({t, watts});
      if (memory) memory_.push_back({t, *memory});
    }
  } else {
    append_sample(t, watts, memory);
  }
  return true;
}

void TraceRecorder::run(std::stop_token stop) {
  // Live providers are read at the start instant too, so stages marked
  // from then on fall inside the trace.
  if (!provider_.finite() && !sample(clock_.now(), true)) return;
  Millis next = clock_.now() + period_;
  while (!stop.stop_requested()) {
    clock_.sleep_until(next);
    if (stop.stop_requested()) break;
    const Millis t = clock_.now();
    if (provider_.exhausted(t)) break;
    if (!sample(t, false)) break;
    next += period_;
    if (next <= t) next = t + period_;
  }
}

void TraceRecorder::start() {
  worker_ = std::jthread([this](std::stop_token stop) { run(stop); });
}

TelemetryTrace TraceRecorder::finish() {
  if (worker_.joinable()) {
    if (!provider_.finite()) worker_.request_stop();
    worker_.join();
  }
  bool closing_sample = false;
  {
    std::lock_guard lock(mu_);
    closing_sample = !provider_.finite() && !samples_.empty() && !error_;
  }
  if (closing_sample) sample(clock_.now(), true);
  std::lock_guard lock(mu_);
  if (samples_.empty()) throw Error("empty trace");
  TelemetryTrace trace;
  trace.samples = samples_;
  trace.memory = memory_;
  trace.spans = spans_.spans();
  trace.nominal_period = period_;
  trace.device_memory_gb = provider_.capabilities().device_memory_gb;
  trace.jitter = jitter_;
  trace.error = error_;
  if (auto open = spans_.open_stage()) {
    const std::string msg = "unclosed span " + std::string(ToString(*open));
    trace.error = trace.error ? *trace.error + "; " + msg : msg;
  }
  return trace;
}

TelemetryTrace RecordTrace(TelemetryProvider& provider, Millis period, std::stop_token stop, Clock& clock) {
  TraceRecorder recorder(provider, period, clock);
  recorder.run(stop);
  return recorder.finish();
}

TelemetryTrace RecordReplay(ReplayProvider& provider, Millis period) {
  VirtualClock clock = provider.MakeClock(period);
  TraceRecorder recorder(provider, period, clock);
  for (const auto& span : provider.source().spans) {
    recorder.mark_stage(span.stage, Edge::Begin, span.start);
    recorder.mark_stage(span.stage, Edge::End, span.end);
  }
  recorder.run(std::stop_token{});
  auto trace = recorder.finish();
  trace.idle_baseline = provider.source().idle_baseline;
  return trace;
}

// ---------------------------------------------------------------------------
// Energy

double IntegrateEnergy(const TelemetryTrace& trace, const StageSpan& span, bool subtract_idle) {
  if (span.end <= span.start) throw Error("span must have positive duration");
  if (subtract_idle && !trace.idle_baseline) throw Error("idle subtraction requested without an idle baseline");
  const auto& s = trace.samples;
  if (s.size() < 2) throw Error("insufficient samples");
  if (span.start < s.front().t || span.end > s.back().t) {
    throw Error("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) + "] outside trace bounds");
  }
  const double baseline = subtract_idle ? *trace.idle_baseline : 0.0;
  auto level = [&](double watts) { return subtract_idle ? std::max(0.0, watts - baseline) : watts; };
  auto at = [&](std::size_t i, Millis t) {
    // Linear interpolation on segment [i, i + 1].
    const auto& a = s[i];
    const auto& b = s[i + 1];
    if (t == a.t) return a.watts;
    if (t == b.t) return b.watts;
    const double frac = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
    return a.watts + (b.watts - a.watts) * frac;
  };

  // Segment containing span.start: last sample index i with s[i].t <= start.
  auto it = std::upper_bound(s.begin(), s.end(), span.start, [](Millis t, const PowerSample& p) { return t < p.t; });
  std::size_t i = static_cast<std::size_t>(std::distance(s.begin(), it)) - 1;
  if (i == s.size() - 1) i = s.size() - 2;

  double joules = 0.0;
  Millis t0 = span.start;
  double p0 = level(at(i, t0));
  while (true) {
    const Millis seg_end = std::min(s[i + 1].t, span.end);
    const double p1 = level(at(i, seg_end));
    joules += static_cast<double>(seg_end - t0) * (p0 + p1) / 2000.0;
    if (seg_end == span.end) break;
    t0 = seg_end;
    p0 = p1;
    ++i;
  }
  return joules;
}

double EstimateIdleBaseline(const TelemetryTrace& trace) {
  bool any_idle = false;
  std::vector<double> watts;
  for (const auto& span : trace.spans) {
    if (span.stage != Stage::Idle) continue;
    any_idle = true;
    if (span.duration() < kMinIdleSpanMs) continue;
    for (const auto& p : trace.samples) {
      if (p.t >= span.start && p.t <= span.end) watts.push_back(p.watts);
    }
  }
  if (!any_idle) throw Error("no Idle span in trace");
  if (watts.empty()) throw Error("no Idle span of at least 5 s with samples");
  return stats::Median(std::move(watts));
}

std::map<Stage, double> StageEnergies(const TelemetryTrace& trace, bool subtract_idle) {
  std::map<Stage, double> out;
  for (const auto& span : trace.spans) out[span.stage] += IntegrateEnergy(trace, span, subtract_idle);
  return out;
}

std::vector<std::pair<Millis, double>> BucketMeans(const TelemetryTrace& trace, Millis bucket_ms) {
  if (bucket_ms <= 0) throw Error("bucket width must be positive");
  std::vector<std::pair<Millis, double>> out;
  double sum = 0.0;
  int count = 0;
  Millis current = 0;
  for (const auto& p : trace.samples) {
    const Millis bucket = (p.t / bucket_ms) * bucket_ms;
    if (count > 0 && bucket != current) {
      out.emplace_back(current, sum / count);
      sum = 0.0;
      count = 0;
    }
    current = bucket;
    sum += p.watts;
    ++count;
  }
  if (count > 0) out.emplace_back(current, sum / count);
  return out;
}

}  // namespace lcbench
