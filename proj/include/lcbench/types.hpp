#pragma once

// Domain types shared by every lcbench module.
//
// All values are plain immutable-after-construction structs. Energies follow
// the table units used in reports: adaptation energy in kWh, load and
// per-request inference energy in joules. Timestamps are integer
// milliseconds relative to a per-trace epoch.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcbench {

using Millis = std::int64_t;

inline constexpr double kJoulesPerKwh = 3.6e6;
inline constexpr double kBytesPerGb = 1073741824.0;  // 2^30

inline constexpr double JoulesToKwh(double joules) { return joules / kJoulesPerKwh; }
inline constexpr double KwhToJoules(double kwh) { return kwh * kJoulesPerKwh; }

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Family { LLaMA, Qwen };
enum class Tier { Micro, Compact, Standard };
enum class Task { Summarization, RAG, Chat };
enum class Adaptation { LoRA_FP16, LoRA_INT8, LoRA_INT4_PTQ, QLoRA_INT4 };
enum class Precision { FP16, INT8, INT4 };
enum class Stage { Adaptation, Compression, Load, Inference, Idle };
enum class Edge { Begin, End };

std::string_view ToString(Family f);
std::string_view ToString(Tier t);
std::string_view ToString(Task t);
std::string_view ToString(Adaptation a);
std::string_view ToString(Precision p);
std::string_view ToString(Stage s);
std::string_view ToString(Edge e);

// Parsers accept exactly the strings produced by ToString and throw Error
// otherwise.
Family ParseFamily(std::string_view s);
Tier ParseTier(std::string_view s);
Task ParseTask(std::string_view s);
Adaptation ParseAdaptation(std::string_view s);
Precision ParsePrecision(std::string_view s);
Stage ParseStage(std::string_view s);
Edge ParseEdge(std::string_view s);

/// The precision a model is served at after the given adaptation strategy.
Precision InferencePrecision(Adaptation a);

/// Upper end of the raw score scale of a task: 10 for judge-rated chat,
/// 1 for entailment and ROUGE-style scores.
double TaskScaleMax(Task t);

struct ConfigKey {
  Family family;
  Tier tier;
  Task task;
  Adaptation adaptation;

  auto operator<=>(const ConfigKey&) const = default;
};

struct Configuration {
  Family family = Family::LLaMA;
  Tier tier = Tier::Micro;
  Task task = Task::Summarization;
  Adaptation adaptation = Adaptation::LoRA_FP16;
  std::string model_id;

  Precision precision_at_inference() const { return InferencePrecision(adaptation); }
  ConfigKey key() const { return {family, tier, task, adaptation}; }

  // "LLaMA/Micro/Chat/LoRA-FP16"; stable across runs and used as row label.
  std::string id() const;

  bool operator==(const Configuration&) const = default;
};

Configuration ParseConfigId(std::string_view id);

struct StageSpan {
  Stage stage = Stage::Idle;
  Millis start = 0;
  Millis end = 0;

  Millis duration() const { return end - start; }
  bool operator==(const StageSpan&) const = default;
};

struct PowerSample {
  Millis t = 0;
  double watts = 0.0;

  bool operator==(const PowerSample&) const = default;
};

struct MemorySample {
  Millis t = 0;
  double gb = 0.0;

  bool operator==(const MemorySample&) const = default;
};

/// Sampler health recorded alongside a trace.
struct JitterFlags {
  Millis tolerance_ms = 0;  // accepted deviation from the nominal period
  int rejected = 0;         // samples dropped for arriving too early
  int gaps = 0;             // intervals longer than three nominal periods

  bool operator==(const JitterFlags&) const = default;
};

struct TelemetryTrace {
  std::vector<PowerSample> samples;
  std::vector<StageSpan> spans;
  std::vector<MemorySample> memory;
  Millis nominal_period = 100;
  std::optional<double> idle_baseline;
  double device_memory_gb = 0.0;
  JitterFlags jitter;
  std::optional<std::string> error;  // set when recording stopped early

  Millis first_time() const { return samples.empty() ? 0 : samples.front().t; }
  Millis last_time() const { return samples.empty() ? 0 : samples.back().t; }

  // First span of the given stage, if any.
  std::optional<StageSpan> find_span(Stage stage) const;

  bool operator==(const TelemetryTrace&) const = default;
};

struct RequestTiming {
  Millis submit = 0;
  Millis first_token = 0;
  std::vector<Millis> token_times;
  std::int64_t tokens_out = 0;

  bool operator==(const RequestTiming&) const = default;
};

/// Reduction of a latency distribution over a batch of requests.
struct LatencySummary {
  double median = 0.0;
  double p95 = 0.0;
  double mean = 0.0;
  double std = 0.0;

  bool operator==(const LatencySummary&) const = default;
};

struct LifecycleRecord {
  Configuration config;
  double E_train = 0.0;   // kWh
  double E_load = 0.0;    // J
  double E_infer = 0.0;   // J per request
  double T_put = 0.0;     // tokens/s
  LatencySummary ttft_ms;
  LatencySummary itl_ms;
  double M_vram = 0.0;    // GB
  double S_task = 0.0;    // raw task scale
  int run_index = 0;

  bool carries_inference() const { return T_put > 0.0 || E_infer > 0.0; }
  bool operator==(const LifecycleRecord&) const = default;
};

struct PrecisionScorePair {
  double S_FP16 = 0.0;
  double S_INT4 = 0.0;
  double std_FP16 = 0.0;
  double std_INT4 = 0.0;
};

struct EconomicModel {
  double C_setup = 0.0;            // currency
  double C_api = 0.0;              // currency per request
  double electricity_price = 0.0;  // currency per kWh
  double carbon_intensity = 0.0;   // kg CO2 per kWh
  double amortization = 0.0;       // currency per GPU-hour

  bool operator==(const EconomicModel&) const = default;
};

/// Break-even request count; nullopt means local serving never pays off.
using BreakEven = std::optional<std::int64_t>;

struct DeploymentMetrics {
  BreakEven N_break;
  double IPW = 0.0;
  double rho_sys = 0.0;
  double C_tax = 0.0;
  std::optional<double> Q_ret;
  std::optional<double> speedup;
  std::optional<double> energy_savings;
  std::optional<double> std_delta;

  bool operator==(const DeploymentMetrics&) const = default;
};

struct FieldStats {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;

  bool operator==(const FieldStats&) const = default;
};

struct NamedStats {
  std::string field;
  FieldStats stats;

  bool operator==(const NamedStats&) const = default;
};

struct RunAggregate {
  Configuration config;
  int n_runs = 0;
  std::vector<NamedStats> fields;  // ordered as produced by aggregation

  const FieldStats* find(std::string_view field) const;
  const FieldStats& at(std::string_view field) const;  // throws Error if absent

  bool operator==(const RunAggregate&) const = default;
};

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

/// Checks every LifecycleRecord invariant; an empty result means valid.
std::vector<Violation> ValidateRecord(const LifecycleRecord& r);

}  // namespace lcbench
