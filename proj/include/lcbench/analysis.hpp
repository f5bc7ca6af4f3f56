#pragma once

// Pareto frontiers, ROI-efficiency quadrants and FP16/INT4 pairing over
// per-configuration aggregates.

#include <optional>
#include <string>
#include <vector>

#include "lcbench/types.hpp"

namespace lcbench {

struct FrontierPoint {
  std::string config_id;
  double x = 0.0;
  double y = 0.0;
  bool dominated = false;
  bool duplicate = false;  // ties another point on both axes and lost the id tie-break

  bool operator==(const FrontierPoint&) const = default;
};

/// Sets `dominated` / `duplicate` on every point. p is dominated when some
/// q is at least as good on both axes and strictly better on one. Among
/// points equal on both axes only the lexicographically-first id stays on
/// the frontier. O(n log n).
void MarkFrontier(std::vector<FrontierPoint>& points, bool maximize_x = true, bool minimize_y = true);

/// Non-dominated, non-duplicate points sorted by x (then id). Throws on
/// empty input.
std::vector<FrontierPoint> ParetoFrontier(std::vector<FrontierPoint> points, bool maximize_x = true,
                                          bool minimize_y = true);

enum class Quadrant { TopLeft, TopRight, BottomLeft, BottomRight };
std::string_view ToString(Quadrant q);

struct RoiPoint {
  std::string config_id;
  BreakEven N_break;  // nullopt = never, plotted at +infinity
  double IPW = 0.0;
};

struct RoiThresholds {
  double n0 = 0.0;
  double i0 = 0.0;
};

/// Medians of N_break (never = +inf) and IPW. Throws if the N_break
/// median is not finite or the set is empty.
RoiThresholds MedianThresholds(const std::vector<RoiPoint>& points);

/// Left = N_break <= n0 (fast ROI), top = IPW >= i0.
Quadrant RoiQuadrant(const RoiPoint& p, const RoiThresholds& t);
std::vector<Quadrant> RoiQuadrants(const std::vector<RoiPoint>& points,
                                   std::optional<RoiThresholds> thresholds = std::nullopt);

/// FP16-inference (LoRA-FP16) and INT4-inference partners of the same
/// family/tier/task. The post-training INT4 variant is preferred as the
/// INT4 partner; QLoRA-INT4 is used when it is absent.
struct PrecisionPair {
  const RunAggregate* fp16 = nullptr;
  const RunAggregate* int4 = nullptr;
};
std::vector<PrecisionPair> PairByPrecision(const std::vector<RunAggregate>& aggregates);

/// Score pair built from the S_task means and standard deviations.
PrecisionScorePair ScorePair(const PrecisionPair& p);

/// Mean of per-pair retentions, the pooling used for family-by-task
/// retention across tiers.
double PooledRetention(const std::vector<PrecisionScorePair>& pairs);

}  // namespace lcbench
