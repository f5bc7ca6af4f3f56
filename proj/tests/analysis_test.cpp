#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "lcbench/analysis.hpp"
#include "lcbench/metrics.hpp"
#include "test_support.hpp"

namespace lcbench {
namespace {

// Direct O(n^2) definition in the maximize-x / minimize-y frame.
std::vector<std::string> OracleFrontier(const std::vector<FrontierPoint>& pts) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j) {
      if (i == j) continue;
      const auto& p = pts[i];
      const auto& q = pts[j];
      const bool dominates = q.x >= p.x && q.y <= p.y && (q.x > p.x || q.y < p.y);
      const bool earlier_twin = q.x == p.x && q.y == p.y && q.config_id < p.config_id;
      keep = !dominates && !earlier_twin;
    }
    if (keep) out.push_back(pts[i].config_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Ids(const std::vector<FrontierPoint>& pts) {
  std::vector<std::string> out;
  for (const auto& p : pts) out.push_back(p.config_id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FrontierPoint> RandomPoints(std::mt19937_64& rng, int n) {
  // Coarse grid so ties and duplicates are common.
  std::uniform_int_distribution<int> coord(0, 12);
  std::vector<FrontierPoint> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back({"c" + std::to_string(i), 100.0 * coord(rng), 0.25 * coord(rng), false, false});
  }
  return pts;
}

TEST(Pareto, SmallExample) {
  const std::vector<FrontierPoint> pts = {
      {"a", 10, 5, false, false}, {"b", 20, 6, false, false}, {"c", 15, 7, false, false},
      {"d", 20, 6, false, false}, {"e", 5, 1, false, false},
  };
  const auto f = ParetoFrontier(pts);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].config_id, "e");
  EXPECT_EQ(f[1].config_id, "a");
  EXPECT_EQ(f[2].config_id, "b");

  auto marked = pts;
  MarkFrontier(marked);
  EXPECT_TRUE(marked[2].dominated);
  EXPECT_TRUE(marked[3].duplicate);
  EXPECT_FALSE(marked[3].dominated);
}

TEST(Pareto, OrientationFlags) {
  const std::vector<FrontierPoint> pts = {{"a", 1, 1, false, false}, {"b", 2, 2, false, false}};
  EXPECT_EQ(Ids(ParetoFrontier(pts, true, true)), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(Ids(ParetoFrontier(pts, false, true)), (std::vector<std::string>{"a"}));
  EXPECT_EQ(Ids(ParetoFrontier(pts, true, false)), (std::vector<std::string>{"b"}));
  EXPECT_THROW(ParetoFrontier({}), Error);
}

TEST(Pareto, MatchesQuadraticOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 100);
    const auto pts = RandomPoints(rng, n);
    ASSERT_EQ(Ids(ParetoFrontier(pts)), OracleFrontier(pts)) << "trial " << trial;
  }
}

TEST(Pareto, IdempotentAndOrderIndependent) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = RandomPoints(rng, 1 + static_cast<int>(rng() % 100));
    const auto f = ParetoFrontier(pts);
    EXPECT_EQ(ParetoFrontier(f), f);
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_EQ(ParetoFrontier(pts), f);
  }
}

TEST(Pareto, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-100.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = RandomPoints(rng, 1 + static_cast<int>(rng() % 100));
    const auto before = Ids(ParetoFrontier(pts));
    const double ax = scale(rng), bx = shift(rng), ay = scale(rng), by = shift(rng);
    for (auto& p : pts) {
      p.x = ax * p.x + bx;
      p.y = ay * p.y + by;
    }
    EXPECT_EQ(Ids(ParetoFrontier(pts)), before);
  }
}

TEST(Pareto, AllDuplicatesKeepFirstId) {
  std::vector<FrontierPoint> pts = {{"z", 1, 1, false, false}, {"m", 1, 1, false, false}, {"q", 1, 1, false, false}};
  const auto f = ParetoFrontier(pts);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].config_id, "m");
}

TEST(Quadrants, DeploymentRowsUnderMedianThresholds) {
  // N_break and IPW for the six family/size rows of the deployment table.
  const std::vector<RoiPoint> pts = {
      {"llama-micro", 14, 0.45},   {"llama-compact", 33, 0.27}, {"llama-standard", 43, 0.15},
      {"qwen-micro", 21, 0.48},    {"qwen-compact", 28, 0.23},  {"qwen-standard", 39, 0.14},
  };
  const auto t = MedianThresholds(pts);
  EXPECT_DOUBLE_EQ(t.n0, 30.5);
  EXPECT_DOUBLE_EQ(t.i0, 0.25);
  const auto q = RoiQuadrants(pts);
  EXPECT_EQ(q[0], Quadrant::TopLeft);
  EXPECT_EQ(q[2], Quadrant::BottomRight);
  EXPECT_EQ(q[1], Quadrant::TopRight);
  EXPECT_EQ(q[4], Quadrant::BottomLeft);
  EXPECT_EQ(ToString(Quadrant::TopLeft), "top-left");
}

TEST(Quadrants, TiesAndNever) {
  const RoiThresholds t{20, 0.3};
  EXPECT_EQ(RoiQuadrant({"a", 20, 0.3}, t), Quadrant::TopLeft);
  EXPECT_EQ(RoiQuadrant({"b", 21, 0.29}, t), Quadrant::BottomRight);
  EXPECT_EQ(RoiQuadrant({"c", std::nullopt, 0.9}, t), Quadrant::TopRight);
  EXPECT_THROW(MedianThresholds({}), Error);
  EXPECT_THROW(MedianThresholds({{"a", std::nullopt, 1}, {"b", std::nullopt, 1}, {"c", 3, 1}}), Error);
  const auto mixed = MedianThresholds({{"a", std::nullopt, 1}, {"b", 5, 1}, {"c", 3, 1}});
  EXPECT_EQ(mixed.n0, 5);
}

RunAggregate ScoreAggregate(const Configuration& c, double mean, double sd) {
  RunAggregate a;
  a.config = c;
  a.n_runs = 3;
  a.fields.push_back({"S_task", {mean, mean, sd, mean, mean}});
  return a;
}

TEST(Pairing, PrefersPostTrainingInt4) {
  using testing::MakeConfig;
  std::vector<RunAggregate> aggs = {
      ScoreAggregate(MakeConfig(Family::LLaMA, Tier::Micro, Task::Chat, Adaptation::QLoRA_INT4), 7.0, 0.1),
      ScoreAggregate(MakeConfig(Family::LLaMA, Tier::Micro, Task::Chat, Adaptation::LoRA_FP16), 6.67, 0.2),
      ScoreAggregate(MakeConfig(Family::LLaMA, Tier::Micro, Task::Chat, Adaptation::LoRA_INT4_PTQ), 6.72, 0.3),
      ScoreAggregate(MakeConfig(Family::LLaMA, Tier::Compact, Task::Chat, Adaptation::LoRA_FP16), 7.58, 0.1),
      ScoreAggregate(MakeConfig(Family::LLaMA, Tier::Compact, Task::Chat, Adaptation::QLoRA_INT4), 7.57, 0.1),
      ScoreAggregate(MakeConfig(Family::Qwen, Tier::Micro, Task::Chat, Adaptation::LoRA_FP16), 7.0, 0.1),
  };
  const auto pairs = PairByPrecision(aggs);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].int4->config.adaptation, Adaptation::LoRA_INT4_PTQ);
  EXPECT_EQ(pairs[1].int4->config.adaptation, Adaptation::QLoRA_INT4);
  const auto s = ScorePair(pairs[0]);
  EXPECT_EQ(s.S_FP16, 6.67);
  EXPECT_EQ(s.std_INT4, 0.3);
  const double pooled = PooledRetention({ScorePair(pairs[0]), ScorePair(pairs[1])});
  EXPECT_NEAR(pooled, (6.72 / 6.67 + 7.57 / 7.58) / 2 * 100, 1e-9);
}

}  // namespace
}  // namespace lcbench
