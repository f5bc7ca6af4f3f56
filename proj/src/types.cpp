#include "lcbench/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace lcbench {
namespace {

template <typename E, std::size_t N>
E ParseEnum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& names,
            std::string_view what) {
  for (const auto& [value, name] : names) {
    if (name == s) return value;
  }
  throw Error("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view NameOf(E value, const std::array<std::pair<E, std::string_view>, N>& names) {
  for (const auto& [v, name] : names) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Family, std::string_view>, 2> kFamilies{{
    {Family::LLaMA, "LLaMA"},
    {Family::Qwen, "Qwen"},
}};
constexpr std::array<std::pair<Tier, std::string_view>, 3> kTiers{{
    {Tier::Micro, "Micro"},
    {Tier::Compact, "Compact"},
    {Tier::Standard, "Standard"},
}};
constexpr std::array<std::pair<Task, std::string_view>, 3> kTasks{{
    {Task::Summarization, "Summarization"},
    {Task::RAG, "RAG"},
    {Task::Chat, "Chat"},
}};
constexpr std::array<std::pair<Adaptation, std::string_view>, 4> kAdaptations{{
    {Adaptation::LoRA_FP16, "LoRA-FP16"},
    {Adaptation::LoRA_INT8, "LoRA-INT8"},
    {Adaptation::LoRA_INT4_PTQ, "LoRA-INT4-PTQ"},
    {Adaptation::QLoRA_INT4, "QLoRA-INT4"},
}};
constexpr std::array<std::pair<Precision, std::string_view>, 3> kPrecisions{{
    {Precision::FP16, "FP16"},
    {Precision::INT8, "INT8"},
    {Precision::INT4, "INT4"},
}};
constexpr std::array<std::pair<Stage, std::string_view>, 5> kStages{{
    {Stage::Adaptation, "Adaptation"},
    {Stage::Compression, "Compression"},
    {Stage::Load, "Load"},
    {Stage::Inference, "Inference"},
    {Stage::Idle, "Idle"},
}};
constexpr std::array<std::pair<Edge, std::string_view>, 2> kEdges{{
    {Edge::Begin, "begin"},
    {Edge::End, "end"},
}};

}  // namespace

std::string_view ToString(Family f) { return NameOf(f, kFamilies); }
std::string_view ToString(Tier t) { return NameOf(t, kTiers); }
std::string_view ToString(Task t) { return NameOf(t, kTasks); }
std::string_view ToString(Adaptation a) { return NameOf(a, kAdaptations); }
std::string_view ToString(Precision p) { return NameOf(p, kPrecisions); }
std::string_view ToString(Stage s) { return NameOf(s, kStages); }
std::string_view ToString(Edge e) { return NameOf(e, kEdges); }

Family ParseFamily(std::string_view s) { return ParseEnum(s, kFamilies, "family"); }
Tier ParseTier(std::string_view s) { return ParseEnum(s, kTiers, "tier"); }
Task ParseTask(std::string_view s) { return ParseEnum(s, kTasks, "task"); }
Adaptation ParseAdaptation(std::string_view s) { return ParseEnum(s, kAdaptations, "adaptation"); }
Precision ParsePrecision(std::string_view s) { return ParseEnum(s, kPrecisions, "precision"); }
Stage ParseStage(std::string_view s) { return ParseEnum(s, kStages, "stage"); }
Edge ParseEdge(std::string_view s) { return ParseEnum(s, kEdges, "edge"); }

Precision InferencePrecision(Adaptation a) {
  switch (a) {
    case Adaptation::LoRA_FP16:
      return Precision::FP16;
    case Adaptation::LoRA_INT8:
      return Precision::INT8;
    case Adaptation::LoRA_INT4_PTQ:
    case Adaptation::QLoRA_INT4:
      return Precision::INT4;
  }
  return Precision::FP16;
}

double TaskScaleMax(Task t) { return t == Task::Chat ? 10.0 : 1.0; }

std::string Configuration::id() const {
  std::string out;
  out.append(ToString(family)).append("/");
  out.append(ToString(tier)).append("/");
  out.append(ToString(task)).append("/");
  out.append(ToString(adaptation));
  return out;
}

Configuration ParseConfigId(std::string_view id) {
  std::array<std::string_view, 4> parts;
  std::size_t n = 0;
  std::size_t pos = 0;
  while (n < 4) {
    const auto slash = id.find('/', pos);
    if (slash == std::string_view::npos) {
      parts[n++] = id.substr(pos);
      break;
    }
    parts[n++] = id.substr(pos, slash - pos);
    pos = slash + 1;
  }
  if (n != 4 || std::count(id.begin(), id.end(), '/') != 3) {
    throw Error("malformed configuration id '" + std::string(id) + "'");
  }
  Configuration c;
  c.family = ParseFamily(parts[0]);
  c.tier = ParseTier(parts[1]);
  c.task = ParseTask(parts[2]);
  c.adaptation = ParseAdaptation(parts[3]);
  return c;
}

std::optional<StageSpan> TelemetryTrace::find_span(Stage stage) const {
  for (const auto& s : spans) {
    if (s.stage == stage) return s;
  }
  return std::nullopt;
}

const FieldStats* RunAggregate::find(std::string_view field) const {
  for (const auto& f : fields) {
    if (f.field == field) return &f.stats;
  }
  return nullptr;
}

const FieldStats& RunAggregate::at(std::string_view field) const {
  if (const auto* s = find(field)) return *s;
  throw Error("aggregate for " + config.id() + " has no field '" + std::string(field) + "'");
}

std::vector<Violation> ValidateRecord(const LifecycleRecord& r) {
  std::vector<Violation> out;
  auto check_nonneg = [&](std::string_view field, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back({std::string(field), std::string(field) + " ≥ 0"});
  };
  check_nonneg("E_train", r.E_train);
  check_nonneg("E_load", r.E_load);
  check_nonneg("E_infer", r.E_infer);
  check_nonneg("T_put", r.T_put);
  if (r.carries_inference() && !(r.M_vram > 0.0)) {
    out.push_back({"M_vram", "M_vram > 0"});
  } else if (!(r.M_vram >= 0.0)) {
    out.push_back({"M_vram", "M_vram ≥ 0"});
  }
  auto check_summary = [&](std::string_view field, const LatencySummary& s) {
    for (double v : {s.median, s.p95, s.mean, s.std}) {
      if (!(v >= 0.0)) {
        out.push_back({std::string(field), std::string(field) + " statistics ≥ 0"});
        return;
      }
    }
  };
  check_summary("ttft_ms", r.ttft_ms);
  check_summary("itl_ms", r.itl_ms);
  if (!std::isfinite(r.S_task)) out.push_back({"S_task", "S_task finite"});
  if (r.run_index < 0) out.push_back({"run_index", "run_index ≥ 0"});
  return out;
}

}  // namespace lcbench
