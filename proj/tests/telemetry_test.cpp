#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "lcbench/telemetry.hpp"
#include "lcbench/trace_io.hpp"
#include "test_support.hpp"

namespace lcbench {
namespace {

using testing::FunctionProvider;
using testing::MakeTrace;

double SmoothPower(double t_ms) {
  const double t = t_ms / 1000.0;
  return 40.0 + 15.0 * std::sin(2 * std::numbers::pi * t / 7.0) + 5.0 * std::sin(2 * std::numbers::pi * t / 1.9 + 1);
}

TEST(Energy, ThreeSampleTraceIsExactlySevenJoules) {
  const auto trace = MakeTrace({{0, 30}, {100, 40}, {200, 30}});
  EXPECT_EQ(IntegrateEnergy(trace, {Stage::Inference, 0, 200}), 7.0);
}

TEST(Energy, BoundariesInterpolateLinearly) {
  const auto trace = MakeTrace({{0, 30}, {100, 40}, {200, 30}});
  // 35 W at 50 ms, 40 W at 100 ms, 35 W at 150 ms; 31 W and 32 W at 10 and 20 ms.
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, {Stage::Load, 50, 150}), 3.75);
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, {Stage::Load, 10, 20}), 0.01 * 31.5);
}

TEST(Energy, ConstantPower) {
  auto provider = ReplayProvider::Constant(60.0, 10000);
  const auto& trace = provider.source();
  ASSERT_EQ(trace.samples.size(), 100u);
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, {Stage::Adaptation, 0, 9900}), 594.0);
}

TEST(Energy, Errors) {
  const auto trace = MakeTrace({{0, 30}, {100, 40}, {200, 30}});
  EXPECT_THROW(IntegrateEnergy(trace, {Stage::Load, 100, 100}), Error);
  EXPECT_THROW(IntegrateEnergy(trace, {Stage::Load, 150, 250}), Error);
  EXPECT_THROW(IntegrateEnergy(trace, {Stage::Load, 0, 100}, true), Error);
  EXPECT_THROW(IntegrateEnergy(MakeTrace({{0, 30}}), {Stage::Load, 0, 1}), Error);
  try {
    IntegrateEnergy(MakeTrace({{0, 30}}), {Stage::Load, 0, 1});
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "insufficient samples");
  }
}

TEST(Energy, IdleSubtractionClipsAtZero) {
  auto trace = MakeTrace({{0, 60}, {1000, 60}, {2000, 10}, {3000, 10}});
  trace.idle_baseline = 20.0;
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, {Stage::Load, 0, 1000}, true), 40.0);
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, {Stage::Load, 2000, 3000}, true), 0.0);
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, {Stage::Load, 2000, 3000}, false), 10.0);
}

TEST(Energy, MatchesMillisecondRectangleOracle) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    TelemetryTrace trace;
    for (int k = 0; k < 500; ++k) trace.samples.push_back({k * 100, SmoothPower(k * 100.0)});
    std::uniform_int_distribution<Millis> start(0, 20000);
    std::uniform_int_distribution<Millis> length(1000, 29000);
    const Millis a = start(rng);
    const Millis b = std::min<Millis>(a + length(rng), 49900);
    double oracle = 0.0;
    for (Millis t = a; t < b; ++t) oracle += SmoothPower(static_cast<double>(t) + 0.5) / 1000.0;
    const double e = IntegrateEnergy(trace, {Stage::Inference, a, b});
    EXPECT_NEAR(e, oracle, 0.005 * oracle) << "span [" << a << ", " << b << "]";
  }
}

class EnergyProperty : public ::testing::Test {
 protected:
  TelemetryTrace RandomTrace(std::mt19937_64& rng, Millis offset = 0) {
    std::uniform_real_distribution<double> watts(0.0, 300.0);
    std::uniform_int_distribution<Millis> step(50, 150);
    TelemetryTrace t;
    Millis now = offset;
    for (int k = 0; k < 200; ++k) {
      t.samples.push_back({now, watts(rng)});
      now += step(rng);
    }
    return t;
  }
};

TEST_F(EnergyProperty, AdjacentSpansAdd) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto trace = RandomTrace(rng);
    const Millis lo = trace.samples.front().t, hi = trace.samples.back().t;
    std::uniform_int_distribution<Millis> pick(lo, hi);
    std::array<Millis, 3> p{pick(rng), pick(rng), pick(rng)};
    std::sort(p.begin(), p.end());
    if (p[0] == p[1] || p[1] == p[2]) continue;
    const double whole = IntegrateEnergy(trace, {Stage::Load, p[0], p[2]});
    const double parts = IntegrateEnergy(trace, {Stage::Load, p[0], p[1]}) +
                         IntegrateEnergy(trace, {Stage::Load, p[1], p[2]});
    EXPECT_NEAR(whole, parts, 1e-12 * whole);
  }
}

TEST_F(EnergyProperty, ScalesWithPower) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trace = RandomTrace(rng);
    auto doubled = trace;
    for (auto& s : doubled.samples) s.watts *= 2.0;
    const StageSpan span{Stage::Load, trace.samples[3].t + 7, trace.samples[150].t - 3};
    EXPECT_DOUBLE_EQ(IntegrateEnergy(doubled, span), 2.0 * IntegrateEnergy(trace, span));
  }
}

TEST_F(EnergyProperty, TimeShiftInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Millis shift = 123457;
    std::mt19937_64 a(trial), b(trial);
    const auto trace = RandomTrace(a);
    const auto shifted = RandomTrace(b, shift);
    const StageSpan span{Stage::Load, trace.samples[10].t + 11, trace.samples[120].t + 1};
    const StageSpan moved{Stage::Load, span.start + shift, span.end + shift};
    EXPECT_EQ(IntegrateEnergy(trace, span), IntegrateEnergy(shifted, moved));
  }
}

TEST_F(EnergyProperty, MonotoneInSpan) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trace = RandomTrace(rng);
    const Millis a = trace.samples[20].t + 5;
    double previous = 0.0;
    for (Millis len = 10; a + len <= trace.samples.back().t; len += 997) {
      const double e = IntegrateEnergy(trace, {Stage::Load, a, a + len});
      EXPECT_GE(e, previous);
      previous = e;
    }
  }
}

TEST(IdleBaseline, MedianOverLongIdleSpans) {
  TelemetryTrace trace;
  for (Millis t = 0; t <= 8000; t += 100) trace.samples.push_back({t, t <= 6000 ? 25.0 : 70.0});
  trace.spans = {{Stage::Idle, 0, 6000}, {Stage::Load, 6000, 8000}};
  EXPECT_EQ(EstimateIdleBaseline(trace), 25.0);

  trace.spans = {{Stage::Idle, 0, 4000}};
  EXPECT_THROW(EstimateIdleBaseline(trace), Error);
  trace.spans = {{Stage::Load, 0, 4000}};
  EXPECT_THROW(EstimateIdleBaseline(trace), Error);
}

TEST(StageEnergies, SumsPerStage) {
  const auto base = MakeTrace({{0, 10}, {1000, 10}, {2000, 10}, {3000, 10}});
  auto trace = base;
  trace.spans = {{Stage::Load, 0, 1000}, {Stage::Inference, 1000, 2000}, {Stage::Load, 2000, 3000}};
  const auto e = StageEnergies(trace);
  EXPECT_DOUBLE_EQ(e.at(Stage::Load), 20.0);
  EXPECT_DOUBLE_EQ(e.at(Stage::Inference), 10.0);
}

TEST(SpanBuilder, ClosesSpans) {
  SpanBuilder b;
  b.mark(Stage::Load, Edge::Begin, 0);
  EXPECT_EQ(b.open_stage(), Stage::Load);
  b.mark(Stage::Load, Edge::End, 10);
  b.mark(Stage::Inference, Edge::Begin, 10);
  b.mark(Stage::Inference, Edge::End, 30);
  ASSERT_EQ(b.spans().size(), 2u);
  EXPECT_EQ(b.spans()[1], (StageSpan{Stage::Inference, 10, 30}));
  EXPECT_FALSE(b.open_stage());
}

TEST(SpanBuilder, RejectsMalformedSequences) {
  {
    SpanBuilder b;
    EXPECT_THROW(b.mark(Stage::Load, Edge::End, 5), Error);
  }
  {
    SpanBuilder b;
    b.mark(Stage::Load, Edge::Begin, 0);
    EXPECT_THROW(b.mark(Stage::Inference, Edge::Begin, 5), Error);
    EXPECT_THROW(b.mark(Stage::Load, Edge::Begin, 5), Error);
    EXPECT_THROW(b.mark(Stage::Load, Edge::End, 0), Error);
  }
  {
    SpanBuilder b;
    b.mark(Stage::Load, Edge::Begin, 10);
    EXPECT_THROW(b.mark(Stage::Load, Edge::End, 5), Error);
  }
}

// Clock whose wake-ups are delayed by a per-deadline amount.
class LateClock final : public Clock {
 public:
  explicit LateClock(std::map<Millis, Millis> delays) : delays_(std::move(delays)) {}
  Millis now() const override { return now_; }
  void sleep_until(Millis t) override {
    const auto it = delays_.find(t);
    now_ = std::max(now_, t + (it == delays_.end() ? 0 : it->second));
  }

 private:
  std::map<Millis, Millis> delays_;
  Millis now_ = 0;
};

TEST(Recorder, SamplesOnVirtualCadence) {
  std::stop_source stop;
  FunctionProvider provider([&](Millis t) {
    if (t >= 5000) stop.request_stop();
    return 42.0;
  });
  VirtualClock clock(0);
  const auto trace = RecordTrace(provider, 100, stop.get_token(), clock);
  // Start-instant sample at 0, then every 100 ms.
  ASSERT_EQ(trace.samples.size(), 51u);
  EXPECT_EQ(trace.samples.front().t, 0);
  EXPECT_EQ(trace.samples[1].t, 100);
  EXPECT_EQ(trace.samples.back().t, 5000);
  EXPECT_EQ(trace.jitter.tolerance_ms, 50);
  EXPECT_EQ(trace.jitter.rejected, 0);
  EXPECT_EQ(trace.jitter.gaps, 0);
}

TEST(Recorder, FlagsJitter) {
  std::stop_source stop;
  FunctionProvider provider([&](Millis t) {
    if (t >= 2000) stop.request_stop();
    return 1.0;
  });
  // 300 wakes 60 ms late so 400 arrives 40 ms after it: rejected.
  // 1000 wakes 350 ms late: a gap.
  LateClock clock({{300, 60}, {1000, 350}});
  const auto trace = RecordTrace(provider, 100, stop.get_token(), clock);
  EXPECT_EQ(trace.jitter.rejected, 1);
  EXPECT_EQ(trace.jitter.gaps, 1);
  for (std::size_t i = 1; i < trace.samples.size(); ++i) EXPECT_GT(trace.samples[i].t, trace.samples[i - 1].t);
}

TEST(Recorder, ReplayReproducesStoredSamples) {
  auto source = ReplayProvider::Constant(60.0, 10000);
  TelemetryTrace stored = source.source();
  stored.spans = {{Stage::Load, 0, 2000}, {Stage::Inference, 2000, 9000}};
  stored.memory = {{0, 1.0}, {5000, 2.5}};
  ReplayProvider provider(stored);
  const auto trace = RecordReplay(provider);
  EXPECT_EQ(trace.samples, stored.samples);
  EXPECT_EQ(trace.spans, stored.spans);
  ASSERT_EQ(trace.memory.size(), trace.samples.size());
  EXPECT_EQ(trace.memory[49].gb, 1.0);
  EXPECT_EQ(trace.memory[50].gb, 2.5);
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, trace.spans[1]), 420.0);
}

TEST(Recorder, ThreadedMarksWithSteadyClock) {
  FunctionProvider provider([](Millis) { return 50.0; });
  SteadyClock clock;
  TraceRecorder recorder(provider, 5, clock);
  recorder.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  recorder.mark_stage_now(Stage::Load, Edge::Begin);
  std::this_thread::sleep_for(std::chrono::milliseconds(40));
  recorder.mark_stage_now(Stage::Load, Edge::End);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  const auto trace = recorder.finish();
  EXPECT_FALSE(trace.error);
  ASSERT_EQ(trace.spans.size(), 1u);
  EXPECT_GE(trace.samples.size(), 4u);
  EXPECT_GT(IntegrateEnergy(trace, trace.spans[0]), 0.0);
}

TEST(Recorder, EmptyTraceThrows) {
  auto provider = ReplayProvider::Constant(50.0, 100);
  VirtualClock clock(500);
  TraceRecorder recorder(provider, 100, clock);
  recorder.run(std::stop_token{});
  EXPECT_THROW(recorder.finish(), Error);
}

TEST(Recorder, LiveTraceCoversStartAndFinish) {
  // Period far longer than the run: only the boundary samples exist.
  FunctionProvider provider([](Millis) { return 50.0; });
  SteadyClock clock;
  TraceRecorder recorder(provider, 10000, clock);
  recorder.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  recorder.mark_stage_now(Stage::Load, Edge::Begin);
  recorder.mark_stage_now(Stage::Load, Edge::End);
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  const auto trace = recorder.finish();
  ASSERT_EQ(trace.spans.size(), 1u);
  EXPECT_GE(trace.spans[0].duration(), 1);
  EXPECT_LE(trace.first_time(), trace.spans[0].start);
  EXPECT_GE(trace.last_time(), trace.spans[0].end);
  EXPECT_DOUBLE_EQ(IntegrateEnergy(trace, trace.spans[0]), 50.0 * trace.spans[0].duration() / 1000.0);
}

TEST(Recorder, ProviderFailureAndUnclosedSpanAreReported) {
  std::stop_source stop;
  FunctionProvider provider([&](Millis t) -> double {
    if (t >= 300) throw ProviderError("device lost");
    return 10.0;
  });
  VirtualClock clock(0);
  TraceRecorder recorder(provider, 100, clock);
  recorder.mark_stage(Stage::Inference, Edge::Begin, 0);
  recorder.run(stop.get_token());
  const auto trace = recorder.finish();
  ASSERT_TRUE(trace.error);
  EXPECT_NE(trace.error->find("provider failure at t=300"), std::string::npos);
  EXPECT_NE(trace.error->find("unclosed span Inference"), std::string::npos);
  EXPECT_EQ(trace.samples.size(), 3u);
}

TEST(Recorder, PeriodBelowProviderFloor) {
  auto provider = ReplayProvider::Constant(1.0, 1000);
  VirtualClock clock;
  EXPECT_NO_THROW(TraceRecorder(provider, 100, clock));
  EXPECT_THROW(TraceRecorder(provider, 0, clock), Error);
}

TEST(BucketMeans, OneSecondBuckets) {
  TelemetryTrace trace;
  for (Millis t = 0; t < 3000; t += 100) trace.samples.push_back({t, static_cast<double>(t / 100)});
  const auto b = BucketMeans(trace, 1000);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], (std::pair<Millis, double>{0, 4.5}));
  EXPECT_EQ(b[2], (std::pair<Millis, double>{2000, 24.5}));
  EXPECT_THROW(BucketMeans(trace, 0), Error);
}

TEST(TraceIo, RoundTrip) {
  TelemetryTrace t = MakeTrace({{0, 30.5}, {100, 40.25}, {200, 30}});
  t.memory = {{0, 0.5}, {200, 0.625}};
  t.spans = {{Stage::Load, 0, 100}, {Stage::Inference, 100, 200}};
  t.idle_baseline = 21.5;
  t.device_memory_gb = 15.75;
  t.jitter = {50, 2, 1};
  t.error = "provider failure at t=300: device lost";
  const auto text = WriteTrace(t);
  EXPECT_EQ(text.rfind("LCTRACE 1 ", 0), 0u);
  const auto back = ParseTrace(text);
  EXPECT_EQ(back.samples, t.samples);
  EXPECT_EQ(back.memory, t.memory);
  EXPECT_EQ(back.spans, t.spans);
  EXPECT_EQ(back.idle_baseline, t.idle_baseline);
  EXPECT_EQ(back.device_memory_gb, t.device_memory_gb);
  EXPECT_EQ(back.jitter, t.jitter);
  EXPECT_EQ(back.error, t.error);
}

TEST(TraceIo, RejectsMalformedFiles) {
  EXPECT_THROW(ParseTrace(""), Error);
  EXPECT_THROW(ParseTrace("S 0 1\n"), Error);
  EXPECT_THROW(ParseTrace("LCTRACE 2\n"), Error);
  EXPECT_THROW(ParseTrace("LCTRACE 1\nS 100 1\nS 100 2\n"), Error);
  EXPECT_THROW(ParseTrace("LCTRACE 1\nS 0 -1\n"), Error);
  EXPECT_THROW(ParseTrace("LCTRACE 1\nS 0 1\nM Load begin 0\n"), Error);
  EXPECT_THROW(ParseTrace("LCTRACE 1 bogus=1\n"), Error);
  EXPECT_THROW(ParseTrace("LCTRACE 1\nX 1 2\n"), Error);
}

}  // namespace
}  // namespace lcbench
