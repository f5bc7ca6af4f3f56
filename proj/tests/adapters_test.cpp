#include <gtest/gtest.h>

#include <random>

#include "lcbench/adapters.hpp"
#include "lcbench/latency.hpp"
#include "mock_server.hpp"
#include "test_support.hpp"

namespace lcbench {
namespace {

using testing::FunctionProvider;

TEST(Marker, ParsesAndFormats) {
  const auto m = ParseMarker("MARK Compression begin 1500 method=awq bits=4");
  EXPECT_EQ(m.stage, Stage::Compression);
  EXPECT_EQ(m.edge, Edge::Begin);
  EXPECT_EQ(m.t, 1500);
  EXPECT_EQ(m.aux_value("bits"), "4");
  EXPECT_FALSE(m.aux_value("group"));
  EXPECT_EQ(FormatMarker(m), "MARK Compression begin 1500 method=awq bits=4");
  EXPECT_EQ(ParseMarker("MARK Load end 0").t, 0);
}

TEST(Marker, RecognizesMarkerLines) {
  EXPECT_TRUE(IsMarkerLine("MARK Load begin 1"));
  EXPECT_TRUE(IsMarkerLine("MARK"));
  EXPECT_FALSE(IsMarkerLine("MARKER Load begin 1"));
  EXPECT_FALSE(IsMarkerLine("loading weights"));
}

TEST(Marker, RejectsMalformedLines) {
  for (const char* line : {"MARK", "MARK Load begin", "MARK Warmup begin 1", "MARK Load middle 1",
                           "MARK Load begin 01", "MARK Load begin -1", "MARK Load begin 1.5",
                           "MARK Load begin 1 k", "MARK Load begin 1 9k=v", "MARK Load begin 1 k=",
                           "MARK Load begin 99999999999999999999"}) {
    try {
      ParseMarker(line);
      ADD_FAILURE() << "accepted: " << line;
    } catch (const MarkerError& e) {
      EXPECT_NE(std::string(e.what()).find(std::string("'") + line + "'"), std::string::npos) << e.what();
    }
  }
}

TEST(Marker, RoundTripProperty) {
  std::mt19937_64 rng(7);
  const Stage stages[] = {Stage::Idle, Stage::Adaptation, Stage::Compression, Stage::Load, Stage::Inference};
  for (int trial = 0; trial < 500; ++trial) {
    MarkerMessage m;
    m.stage = stages[rng() % 5];
    m.edge = rng() % 2 ? Edge::Begin : Edge::End;
    m.t = static_cast<Millis>(rng() % 100000000);
    for (int k = 0; k < static_cast<int>(rng() % 3); ++k) {
      m.aux.emplace_back("k_" + std::to_string(k), std::to_string(rng() % 1000));
    }
    EXPECT_EQ(ParseMarker(FormatMarker(m)), m);
  }
}

class StageProcessTest : public ::testing::Test {
 protected:
  StageProcessTest() : provider_([](Millis) { return 80.0; }, 1.0), recorder_(provider_, 10, clock_) {
    recorder_.start();
  }
  FunctionProvider provider_;
  SteadyClock clock_;
  TraceRecorder recorder_;
};

TEST_F(StageProcessTest, AppliesWorkloadMarkers) {
  const auto result = RunStageProcess(
      "printf 'loading\\nMARK Adaptation begin 100 lr=2e-4\\nMARK Adaptation end 150\\n'; sleep 0.05", Stage::Adaptation,
      recorder_);
  EXPECT_EQ(result.exit_status, 0);
  EXPECT_FALSE(result.wrapped);
  ASSERT_EQ(result.markers.size(), 2u);
  EXPECT_EQ(result.output, (std::vector<std::string>{"loading"}));
  const auto trace = recorder_.finish();
  ASSERT_EQ(trace.spans.size(), 1u);
  EXPECT_EQ(trace.spans[0].stage, Stage::Adaptation);
  EXPECT_EQ(trace.spans[0].duration(), 50);
}

TEST_F(StageProcessTest, WrapsSilentProcess) {
  const auto result = RunStageProcess("sleep 0.05", Stage::Compression, recorder_);
  EXPECT_TRUE(result.wrapped);
  const auto trace = recorder_.finish();
  ASSERT_EQ(trace.spans.size(), 1u);
  EXPECT_EQ(trace.spans[0].stage, Stage::Compression);
  EXPECT_GE(trace.spans[0].duration(), 40);
}

TEST_F(StageProcessTest, NonzeroExitFails) {
  try {
    RunStageProcess("echo training; exit 3", Stage::Adaptation, recorder_);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_NE(std::string(e.what()).find("status 3"), std::string::npos);
  }
}

TEST_F(StageProcessTest, MalformedMarkerQuoted) {
  try {
    RunStageProcess("echo 'MARK Load begin soon'; sleep 5", Stage::Load, recorder_);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_NE(std::string(e.what()).find("'MARK Load begin soon'"), std::string::npos) << e.what();
  }
}

TEST_F(StageProcessTest, OutOfOrderMarkerRejected) {
  EXPECT_THROW(RunStageProcess("printf 'MARK Load begin 100\\nMARK Load end 40\\n'", Stage::Load, recorder_),
               StageError);
}

TEST(Subprocess, TerminateReportsSignal) {
  Subprocess p("echo ready; exec sleep 30");
  EXPECT_EQ(p.read_line(), "ready");
  EXPECT_TRUE(p.running());
  p.terminate();
  EXPECT_EQ(p.wait(), 128 + 15);
  EXPECT_FALSE(p.running());
}

TEST(Subprocess, UnterminatedLastLine) {
  Subprocess p("printf 'a\\nb'");
  EXPECT_EQ(p.read_line(), "a");
  EXPECT_EQ(p.read_line(), "b");
  EXPECT_EQ(p.read_line(), std::nullopt);
  EXPECT_EQ(p.wait(), 0);
}

TEST(StreamInference, ScriptedScheduleIsExact) {
  VirtualClock clock(1000);
  ScriptedEndpoint endpoint(clock, 25, 10, 5);
  const auto out = StreamInference(endpoint, {"m", "hi", 5}, clock);
  EXPECT_FALSE(out.failed);
  EXPECT_EQ(out.timing.submit, 1000);
  EXPECT_EQ(out.timing.first_token, 1025);
  EXPECT_EQ(out.timing.token_times, (std::vector<Millis>{1025, 1035, 1045, 1055, 1065}));
  EXPECT_EQ(out.timing.tokens_out, 5);
  EXPECT_EQ(Ttft(out.timing), 25);
  EXPECT_EQ(Itl(out.timing), 10);
}

class BurstTransport final : public CompletionTransport {
 public:
  explicit BurstTransport(int n) : n_(n) {}
  void stream(const CompletionRequest&, const std::function<void(std::string_view)>& on_chunk) override {
    for (int i = 0; i < n_; ++i) on_chunk("x");
  }

 private:
  int n_;
};

TEST(StreamInference, SameMillisecondChunksStayOrdered) {
  VirtualClock clock(50);
  BurstTransport burst(3);
  const auto out = StreamInference(burst, {}, clock);
  EXPECT_EQ(out.timing.token_times, (std::vector<Millis>{50, 51, 52}));
  BurstTransport none(0);
  EXPECT_THROW(StreamInference(none, {}, clock), Error);
}

TEST(StreamInference, HttpStreamingEndpoint) {
  testing::MockCompletionServer server({30, 10, 8, true, 200});
  SteadyClock clock;
  const auto out = StreamInference(server.url(), "hello", 8, clock);
  ASSERT_FALSE(out.failed) << out.error;
  EXPECT_EQ(out.timing.tokens_out, 8);
  EXPECT_GE(Ttft(out.timing), 30);
  EXPECT_NEAR(Itl(out.timing), 10.0, 3.0);
  EXPECT_NE(server.last_body().find("\"stream\":true"), std::string::npos);
  EXPECT_NE(server.last_body().find("\"prompt\":\"hello\""), std::string::npos);
}

TEST(StreamInference, HttpChatShape) {
  testing::MockCompletionServer server({5, 5, 3, true, 200});
  SteadyClock clock;
  HttpCompletionTransport transport(server.url("/v1/chat/completions"));
  const auto out = StreamInference(transport, {"m", "hi", 3}, clock);
  EXPECT_EQ(out.timing.tokens_out, 3);
  EXPECT_NE(server.last_body().find("\"messages\""), std::string::npos);
}

TEST(StreamInference, NonStreamingEndpointRejected) {
  testing::MockCompletionServer server({0, 0, 1, false, 200});
  SteadyClock clock;
  EXPECT_THROW(StreamInference(server.url(), "hi", 4, clock), StreamingRequiredError);
}

TEST(StreamInference, HttpErrorStatusThrows) {
  testing::MockCompletionServer server({0, 0, 1, true, 500});
  SteadyClock clock;
  try {
    StreamInference(server.url(), "hi", 4, clock);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("HTTP 500"), std::string::npos);
  }
}

TEST(StreamInference, TimeoutYieldsFailedRequest) {
  testing::MockCompletionServer server({800, 10, 2, true, 200});
  SteadyClock clock;
  HttpCompletionTransport transport(server.url(), 150);
  const auto out = StreamInference(transport, {"m", "hi", 2}, clock);
  EXPECT_TRUE(out.failed);
  EXPECT_EQ(out.timing.tokens_out, 0);
}

TEST(StreamInference, RelativeUrlRejected) { EXPECT_THROW(HttpCompletionTransport("localhost:8000"), Error); }

TEST(ProbeVram, PeakOverInferenceSpan) {
  FunctionProvider with_memory([](Millis) { return 1.0; }, 4.0);
  TelemetryTrace t = testing::MakeTrace({{0, 1}, {100, 1}, {200, 1}, {300, 1}});
  t.memory = {{0, 1.0}, {100, 3.0}, {200, 2.5}, {300, 9.0}};
  t.spans = {{Stage::Inference, 150, 250}};
  EXPECT_EQ(ProbeVram(with_memory, t), 3.0);
  t.spans = {{Stage::Inference, 100, 300}};
  EXPECT_EQ(ProbeVram(with_memory, t), 9.0);
  t.spans = {{Stage::Load, 100, 300}};
  EXPECT_THROW(ProbeVram(with_memory, t), Error);
  FunctionProvider without([](Millis) { return 1.0; });
  t.spans = {{Stage::Inference, 100, 300}};
  EXPECT_THROW(ProbeVram(without, t), Error);
}

}  // namespace
}  // namespace lcbench
