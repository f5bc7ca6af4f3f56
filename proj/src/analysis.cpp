#include "lcbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "lcbench/metrics.hpp"
#include "lcbench/stats.hpp"

namespace lcbench {

void MarkFrontier(std::vector<FrontierPoint>& points, bool maximize_x, bool minimize_y) {
  // Work in a maximize/maximize frame.
  auto a = [&](const FrontierPoint& p) { return maximize_x ? p.x : -p.x; };
  auto b = [&](const FrontierPoint& p) { return minimize_y ? -p.y : p.y; };
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& p = points[i];
    const auto& q = points[j];
    if (a(p) != a(q)) return a(p) > a(q);
    if (b(p) != b(q)) return b(p) > b(q);
    return p.config_id < q.config_id;
  });

  double best_b = -std::numeric_limits<double>::infinity();  // over strictly larger a
  bool any_before = false;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const double group_a = a(points[order[i]]);
    while (j < order.size() && a(points[order[j]]) == group_a) ++j;
    const double group_best = b(points[order[i]]);
    for (std::size_t k = i; k < j; ++k) {
      auto& p = points[order[k]];
      const double pb = b(p);
      p.dominated = pb < group_best || (any_before && best_b >= pb);
      p.duplicate = !p.dominated && k > i && pb == group_best;
    }
    if (!any_before || group_best > best_b) best_b = group_best;
    any_before = true;
    i = j;
  }
}

std::vector<FrontierPoint> ParetoFrontier(std::vector<FrontierPoint> points, bool maximize_x, bool minimize_y) {
  if (points.empty()) throw Error("pareto frontier of an empty point set");
  MarkFrontier(points, maximize_x, minimize_y);
  std::vector<FrontierPoint> out;
  for (auto& p : points) {
    if (!p.dominated && !p.duplicate) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const FrontierPoint& p, const FrontierPoint& q) {
    if (p.x != q.x) return p.x < q.x;
    return p.config_id < q.config_id;
  });
  return out;
}

std::string_view ToString(Quadrant q) {
  switch (q) {
    case Quadrant::TopLeft: return "top-left";
    case Quadrant::TopRight: return "top-right";
    case Quadrant::BottomLeft: return "bottom-left";
    case Quadrant::BottomRight: return "bottom-right";
  }
  return "?";
}

namespace {
double NBreakAxis(const RoiPoint& p) {
  return p.N_break ? static_cast<double>(*p.N_break) : std::numeric_limits<double>::infinity();
}
}  // namespace

RoiThresholds MedianThresholds(const std::vector<RoiPoint>& points) {
  if (points.empty()) throw Error("quadrant thresholds of an empty point set");
  std::vector<double> n, ipw;
  for (const auto& p : points) {
    n.push_back(NBreakAxis(p));
    ipw.push_back(p.IPW);
  }
  RoiThresholds t{stats::Median(n), stats::Median(ipw)};
  if (!std::isfinite(t.n0) || !std::isfinite(t.i0)) throw Error("quadrant thresholds must be finite");
  return t;
}

Quadrant RoiQuadrant(const RoiPoint& p, const RoiThresholds& t) {
  const bool left = NBreakAxis(p) <= t.n0;
  const bool top = p.IPW >= t.i0;
  if (top) return left ? Quadrant::TopLeft : Quadrant::TopRight;
  return left ? Quadrant::BottomLeft : Quadrant::BottomRight;
}

std::vector<Quadrant> RoiQuadrants(const std::vector<RoiPoint>& points, std::optional<RoiThresholds> thresholds) {
  if (points.empty()) return {};
  const auto t = thresholds ? *thresholds : MedianThresholds(points);
  if (!std::isfinite(t.n0) || !std::isfinite(t.i0)) throw Error("quadrant thresholds must be finite");
  std::vector<Quadrant> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(RoiQuadrant(p, t));
  return out;
}

std::vector<PrecisionPair> PairByPrecision(const std::vector<RunAggregate>& aggregates) {
  struct Slot {
    const RunAggregate* fp16 = nullptr;
    const RunAggregate* ptq = nullptr;
    const RunAggregate* qlora = nullptr;
  };
  std::map<std::tuple<Family, Tier, Task>, Slot> slots;
  for (const auto& agg : aggregates) {
    auto& s = slots[{agg.config.family, agg.config.tier, agg.config.task}];
    switch (agg.config.adaptation) {
      case Adaptation::LoRA_FP16: s.fp16 = &agg; break;
      case Adaptation::LoRA_INT4_PTQ: s.ptq = &agg; break;
      case Adaptation::QLoRA_INT4: s.qlora = &agg; break;
      case Adaptation::LoRA_INT8: break;
    }
  }
  std::vector<PrecisionPair> out;
  for (const auto& [key, s] : slots) {
    const RunAggregate* int4 = s.ptq ? s.ptq : s.qlora;
    if (s.fp16 && int4) out.push_back({s.fp16, int4});
  }
  return out;
}

PrecisionScorePair ScorePair(const PrecisionPair& p) {
  const auto& a = p.fp16->at("S_task");
  const auto& b = p.int4->at("S_task");
  return {a.mean, b.mean, a.std, b.std};
}

double PooledRetention(const std::vector<PrecisionScorePair>& pairs) {
  if (pairs.empty()) throw Error("pooled retention of no pairs");
  double sum = 0.0;
  for (const auto& p : pairs) sum += QuantizationFidelity(p);
  return sum / static_cast<double>(pairs.size());
}

}  // namespace lcbench
