#pragma once

// Factorial sweep planning, execution and per-configuration aggregation.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lcbench/economics.hpp"
#include "lcbench/keyed_text.hpp"
#include "lcbench/run_store.hpp"
#include "lcbench/telemetry.hpp"
#include "lcbench/types.hpp"

namespace lcbench {

inline constexpr int kDefaultRunsPerConfig = 20;
inline constexpr int kDefaultEvaluationPasses = 3;
inline constexpr int kDefaultRequestsPerRun = 100;

struct SweepPlan {
  std::set<Family> families;
  std::set<Tier> tiers;
  std::set<Task> tasks;
  std::set<Adaptation> adaptations;
  int runs_per_config = kDefaultRunsPerConfig;
  int evaluation_passes = kDefaultEvaluationPasses;
  int requests_per_run = kDefaultRequestsPerRun;
  bool readapt_each_run = false;  // default: adapt once, measure inference every run
  std::map<std::pair<Family, Tier>, std::string> model_ids;

  std::size_t size() const { return families.size() * tiers.size() * tasks.size() * adaptations.size(); }
};

// Plan file (keyed text):
//   families = LLaMA, Qwen
//   tiers = Micro, Compact, Standard
//   tasks = Summarization, RAG, Chat
//   adaptations = LoRA-FP16, QLoRA-INT4
//   runs_per_config = 20
//   evaluation_passes = 3
//   requests_per_run = 100
//   readapt_each_run = false
//   model.LLaMA.Micro = meta-llama/Llama-3.2-1B-Instruct
SweepPlan ParsePlan(const KeyedText& text);
SweepPlan LoadPlan(const std::filesystem::path& path);

/// Configurations in lexicographic (family, tier, task, adaptation) order.
std::vector<Configuration> EnumeratePlan(const SweepPlan& plan);

struct InferenceOutcome {
  std::vector<RequestTiming> requests;
  std::vector<double> pass_scores;  // one task score per evaluation pass
};

/// Drives the three lifecycle stages of one run, marking stage spans on
/// the recorder as it goes. Any exception fails only the current run.
class Workload {
 public:
  virtual ~Workload() = default;

  virtual bool supports(Adaptation a) const = 0;

  // Adaptation (and Compression, for post-training quantization).
  virtual void adapt(const Configuration& config, int run_index, TraceRecorder& recorder) = 0;
  virtual void load(const Configuration& config, int run_index, TraceRecorder& recorder) = 0;
  virtual InferenceOutcome infer(const Configuration& config, int run_index, int n_requests, int passes,
                                 TraceRecorder& recorder) = 0;
  virtual void teardown(const Configuration& /*config*/, int /*run_index*/) {}
};

/// A provider and the clock its trace is recorded against.
struct TelemetrySession {
  std::unique_ptr<TelemetryProvider> provider;
  std::unique_ptr<Clock> clock;
};

class ProviderSource {
 public:
  virtual ~ProviderSource() = default;
  virtual TelemetrySession open(const Configuration& config, int run_index, Millis period) = 0;
};

struct ExecuteOptions {
  Millis period = kDefaultPeriodMs;
  bool retry_failed = false;
  bool subtract_idle = false;
  std::optional<std::filesystem::path> trace_out;  // one trace file per run
  std::function<void(const std::string&)> log;
};

struct ExecuteSummary {
  int executed = 0;
  int skipped = 0;
  int failed = 0;
};

/// Segments a recorded run into a LifecycleRecord. `reused_E_train` (kWh)
/// replaces the adaptation measurement when the run did not re-adapt.
LifecycleRecord BuildRecord(const Configuration& config, int run_index, const TelemetryTrace& trace,
                            const InferenceOutcome& outcome, const TelemetryProvider& provider,
                            std::optional<double> reused_E_train, bool subtract_idle = false);

/// Runs every pending (configuration, run) of the plan and appends its
/// record to the store. Failed runs are marked and skipped; store write
/// failures propagate.
ExecuteSummary Execute(const SweepPlan& plan, Workload& workload, ProviderSource& providers, RunStore& store,
                       const ExecuteOptions& options = {});

/// Per-field statistics over the done runs of one configuration. With
/// metric options, per-run deployment metrics are aggregated as well.
RunAggregate Aggregate(const RunStore& store, const ConfigKey& config, const MetricOptions* metrics = nullptr);
RunAggregate AggregateRecords(const std::vector<LifecycleRecord>& records, const MetricOptions* metrics = nullptr);

/// Aggregates for every configuration in the store, in key order.
std::vector<RunAggregate> AggregateAll(const RunStore& store, const MetricOptions* metrics = nullptr);

}  // namespace lcbench
