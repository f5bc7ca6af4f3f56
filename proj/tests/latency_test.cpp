#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lcbench/latency.hpp"

namespace lcbench {
namespace {

RequestTiming Uniform(Millis submit, Millis ttft, int tokens, Millis gap) {
  RequestTiming r;
  r.submit = submit;
  r.first_token = submit + ttft;
  for (int i = 0; i < tokens; ++i) r.token_times.push_back(r.first_token + i * gap);
  r.tokens_out = tokens;
  return r;
}

RequestTiming WithTimes(std::vector<Millis> times) {
  RequestTiming r;
  r.first_token = times.front();
  r.token_times = std::move(times);
  r.tokens_out = static_cast<std::int64_t>(r.token_times.size());
  return r;
}

TEST(Latency, Ttft) {
  EXPECT_EQ(Ttft(Uniform(0, 48, 3, 10)), 48.0);
  EXPECT_EQ(Ttft(Uniform(5, 0, 3, 10)), 0.0);
}

TEST(Latency, TtftMatchesSubtractionOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Millis> at(0, 1000000), delay(0, 5000);
  for (int i = 0; i < 100; ++i) {
    const Millis s = at(rng), d = delay(rng);
    EXPECT_EQ(Ttft(Uniform(s, d, 2, 3)), static_cast<double>(d));
  }
}

TEST(Latency, Itl) {
  EXPECT_EQ(Itl(WithTimes({0, 10, 20, 30})), 10.0);
  // Gaps 10, 90, 20.
  EXPECT_EQ(Itl(WithTimes({0, 10, 100, 120})), 20.0);
  EXPECT_EQ(ItlMeanGap(WithTimes({0, 10, 100, 120})), 40.0);
  try {
    Itl(WithTimes({5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("undefined ITL"), std::string::npos);
  }
}

TEST(Latency, UniformGapIsExact) {
  for (Millis g : {1, 7, 10, 33, 250}) EXPECT_EQ(Itl(Uniform(0, 5, 40, g)), static_cast<double>(g));
}

TEST(Latency, InvalidTimingRejected) {
  auto r = Uniform(10, 5, 3, 10);
  r.first_token = 5;
  EXPECT_THROW(Ttft(r), Error);
  r = Uniform(0, 5, 3, 10);
  r.token_times[2] = r.token_times[1];
  EXPECT_THROW(Itl(r), Error);
  r = Uniform(0, 5, 3, 10);
  r.tokens_out = 4;
  EXPECT_THROW(CheckRequestTiming(r), Error);
}

TEST(Latency, Throughput) {
  // 2235 tokens over a 1.000 s window, as five 447-token requests.
  std::vector<RequestTiming> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(Uniform(i * 100, 1, 447, 1));
  EXPECT_EQ(Throughput(batch, {Stage::Inference, 0, 1000}), 2235.0);
  EXPECT_EQ(Throughput(std::vector<RequestTiming>{}, {Stage::Inference, 0, 1000}), 0.0);
  EXPECT_THROW(Throughput(batch, {Stage::Inference, 5, 5}), Error);
}

TEST(Latency, ThroughputCountingOracleAndScaling) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> tokens(1, 300);
  std::vector<RequestTiming> batch;
  std::int64_t total = 0;
  for (int i = 0; i < 50; ++i) {
    batch.push_back(Uniform(i * 10, 3, tokens(rng), 1));
    total += batch.back().tokens_out;
  }
  const StageSpan window{Stage::Inference, 0, 2500};
  EXPECT_DOUBLE_EQ(Throughput(batch, window), static_cast<double>(total) / 2.5);
  auto shuffled = batch;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(Throughput(shuffled, window), Throughput(batch, window));
  for (auto& r : batch) r.tokens_out *= 3;
  EXPECT_DOUBLE_EQ(Throughput(batch, window), 3.0 * static_cast<double>(total) / 2.5);
}

TEST(Latency, AggregateOneToHundred) {
  std::vector<RequestTiming> batch;
  for (int i = 1; i <= 100; ++i) batch.push_back(Uniform(i * 1000, i, 5, 10));
  const auto s = AggregateLatency(batch, {Stage::Inference, 0, 200000});
  EXPECT_EQ(s.ttft_ms.median, 50.5);
  EXPECT_EQ(s.ttft_ms.p95, 95.0);
  EXPECT_EQ(s.ttft_ms.mean, 50.5);
  EXPECT_EQ(s.itl_ms.median, 10.0);
  EXPECT_EQ(s.itl_ms.std, 0.0);
  EXPECT_EQ(s.n_requests, 100);
  EXPECT_EQ(s.n_itl, 100);
}

TEST(Latency, AggregateSingleRequest) {
  std::vector<RequestTiming> batch{WithTimes({3, 13, 33})};
  batch[0].submit = 0;
  const auto s = AggregateLatency(batch, {Stage::Inference, 0, 1000});
  EXPECT_EQ(s.ttft_ms, (LatencySummary{3, 3, 3, 0}));
  EXPECT_EQ(s.itl_ms, (LatencySummary{15, 15, 15, 0}));
  EXPECT_EQ(s.throughput_tok_s, 3.0);
}

TEST(Latency, AggregateExcludesSingleTokenRequestsFromItl) {
  std::vector<RequestTiming> batch{Uniform(0, 5, 1, 10), Uniform(0, 7, 4, 20)};
  const auto s = AggregateLatency(batch, {Stage::Inference, 0, 1000});
  EXPECT_EQ(s.n_itl, 1);
  EXPECT_EQ(s.itl_ms.median, 20.0);
  EXPECT_EQ(s.ttft_ms.median, 6.0);
  EXPECT_THROW(AggregateLatency(std::vector<RequestTiming>{}, {Stage::Inference, 0, 1}), Error);
}

TEST(Latency, AggregatePermutationInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<Millis> ttft(1, 500), gap(1, 60);
  std::vector<RequestTiming> batch;
  for (int i = 0; i < 40; ++i) batch.push_back(Uniform(i * 100, ttft(rng), 8, gap(rng)));
  const StageSpan window{Stage::Inference, 0, 10000};
  const auto a = AggregateLatency(batch, window);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(batch.begin(), batch.end(), rng);
    const auto b = AggregateLatency(batch, window);
    EXPECT_EQ(a.ttft_ms.median, b.ttft_ms.median);
    EXPECT_EQ(a.ttft_ms.p95, b.ttft_ms.p95);
    EXPECT_EQ(a.itl_ms.median, b.itl_ms.median);
    EXPECT_NEAR(a.ttft_ms.mean, b.ttft_ms.mean, 1e-9);
    EXPECT_NEAR(a.itl_ms.std, b.itl_ms.std, 1e-9);
  }
}

TEST(RequestFile, RoundTrip) {
  std::vector<RequestTiming> batch{Uniform(0, 48, 3, 10), Uniform(100, 0, 1, 1)};
  const auto text = WriteRequests(batch);
  EXPECT_EQ(FormatRequestLine(batch[0]), "R 0 48 3 48 58 68");
  EXPECT_EQ(ParseRequests("# comment\n" + text), batch);
}

TEST(RequestFile, RejectsMalformedLines) {
  EXPECT_THROW(ParseRequestLine("R 0 48 3 48 58"), Error);
  EXPECT_THROW(ParseRequestLine("Q 0 48 1 48"), Error);
  EXPECT_THROW(ParseRequestLine("R 0 48 1 x"), Error);
  EXPECT_THROW(ParseRequestLine("R 10 5 1 5"), Error);
}

}  // namespace
}  // namespace lcbench
