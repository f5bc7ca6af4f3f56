#include "lcbench/sweep.hpp"

#include <algorithm>

#include "lcbench/adapters.hpp"
#include "lcbench/latency.hpp"
#include "lcbench/stats.hpp"
#include "lcbench/trace_io.hpp"

namespace lcbench {
namespace {

template <typename E>
std::set<E> ParseAxis(const KeyedText& text, const char* key, E (*parse)(std::string_view)) {
  std::set<E> out;
  for (const auto& item : text.get_list(key)) out.insert(parse(item));
  return out;
}

bool ParseBool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("not a boolean: '" + v + "'");
}

std::string Slug(const Configuration& c) {
  std::string id = c.id();
  std::replace(id.begin(), id.end(), '/', '_');
  return id;
}

}  // namespace

SweepPlan ParsePlan(const KeyedText& text) {
  SweepPlan plan;
  plan.families = ParseAxis(text, "families", &ParseFamily);
  plan.tiers = ParseAxis(text, "tiers", &ParseTier);
  plan.tasks = ParseAxis(text, "tasks", &ParseTask);
  plan.adaptations = ParseAxis(text, "adaptations", &ParseAdaptation);
  plan.runs_per_config = static_cast<int>(text.get_int("runs_per_config", kDefaultRunsPerConfig));
  plan.evaluation_passes = static_cast<int>(text.get_int("evaluation_passes", kDefaultEvaluationPasses));
  plan.requests_per_run = static_cast<int>(text.get_int("requests_per_run", kDefaultRequestsPerRun));
  if (auto v = text.get("readapt_each_run")) plan.readapt_each_run = ParseBool(*v);
  for (const auto& [key, id] : text.with_prefix("model.")) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw Error("model key must be model.<Family>.<Tier>: 'model." + key + "'");
    plan.model_ids[{ParseFamily(key.substr(0, dot)), ParseTier(key.substr(dot + 1))}] = id;
  }
  if (plan.runs_per_config < 1) throw Error("runs_per_config must be >= 1");
  if (plan.evaluation_passes < 1) throw Error("evaluation_passes must be >= 1");
  if (plan.requests_per_run < 1) throw Error("requests_per_run must be >= 1");
  return plan;
}

SweepPlan LoadPlan(const std::filesystem::path& path) { return ParsePlan(KeyedText::Load(path)); }

std::vector<Configuration> EnumeratePlan(const SweepPlan& plan) {
  if (plan.families.empty()) throw Error("plan has no families");
  if (plan.tiers.empty()) throw Error("plan has no tiers");
  if (plan.tasks.empty()) throw Error("plan has no tasks");
  if (plan.adaptations.empty()) throw Error("plan has no adaptations");
  std::vector<Configuration> out;
  out.reserve(plan.size());
  for (Family f : plan.families) {
    for (Tier p : plan.tiers) {
      std::string model_id;
      if (auto it = plan.model_ids.find({f, p}); it != plan.model_ids.end()) {
        model_id = it->second;
      } else {
        model_id = std::string(ToString(f)) + "-" + std::string(ToString(p));
      }
      for (Task t : plan.tasks) {
        for (Adaptation a : plan.adaptations) out.push_back({f, p, t, a, model_id});
      }
    }
  }
  return out;
}

LifecycleRecord BuildRecord(const Configuration& config, int run_index, const TelemetryTrace& trace,
                            const InferenceOutcome& outcome, const TelemetryProvider& provider,
                            std::optional<double> reused_E_train, bool subtract_idle) {
  if (trace.error) throw Error("trace incomplete: " + *trace.error);
  TelemetryTrace working = trace;
  if (subtract_idle && !working.idle_baseline) working.idle_baseline = EstimateIdleBaseline(working);

  const auto load = working.find_span(Stage::Load);
  if (!load) throw Error("trace has no Load span");
  const auto inference = working.find_span(Stage::Inference);
  if (!inference) throw Error("trace has no Inference span");
  if (outcome.requests.empty()) throw Error("inference stage produced no completed requests");
  if (outcome.pass_scores.empty()) throw Error("inference stage produced no task scores");

  LifecycleRecord r;
  r.config = config;
  r.run_index = run_index;
  if (reused_E_train) {
    r.E_train = *reused_E_train;
  } else {
    double joules = 0.0;
    bool adapted = false;
    for (const auto& span : working.spans) {
      if (span.stage == Stage::Adaptation || span.stage == Stage::Compression) {
        joules += IntegrateEnergy(working, span, subtract_idle);
        adapted = adapted || span.stage == Stage::Adaptation;
      }
    }
    if (!adapted) throw Error("trace has no Adaptation span");
    r.E_train = JoulesToKwh(joules);
  }
  r.E_load = IntegrateEnergy(working, *load, subtract_idle);
  r.E_infer = IntegrateEnergy(working, *inference, subtract_idle) / static_cast<double>(outcome.requests.size());
  const auto latency = AggregateLatency(outcome.requests, *inference);
  r.T_put = latency.throughput_tok_s;
  r.ttft_ms = latency.ttft_ms;
  r.itl_ms = latency.itl_ms;
  r.M_vram = ProbeVram(provider, working);
  r.S_task = stats::Mean(outcome.pass_scores);
  return r;
}

ExecuteSummary Execute(const SweepPlan& plan, Workload& workload, ProviderSource& providers, RunStore& store,
                       const ExecuteOptions& options) {
  const auto configs = EnumeratePlan(plan);
  for (const auto& c : configs) {
    if (!workload.supports(c.adaptation)) {
      throw Error("no workload adapter registered for " + std::string(ToString(c.adaptation)));
    }
  }
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  ExecuteSummary summary;
  for (const auto& config : configs) {
    // Adaptation energy carried over from an earlier run of this config.
    std::optional<double> adapted_kwh;
    if (!plan.readapt_each_run) {
      for (const auto& r : store.records_for(config.key())) {
        if (!adapted_kwh || r.run_index == 0) adapted_kwh = r.E_train;
      }
    }
    for (int run = 0; run < plan.runs_per_config; ++run) {
      const auto status = store.status(config.key(), run);
      if (status == RunStatus::Done || (status == RunStatus::Failed && !options.retry_failed)) {
        ++summary.skipped;
        continue;
      }
      const bool adapt_now = plan.readapt_each_run || !adapted_kwh;
      LifecycleRecord record;
      try {
        auto session = providers.open(config, run, options.period);
        TraceRecorder recorder(*session.provider, options.period, *session.clock);
        TelemetryTrace trace;
        InferenceOutcome outcome;
        recorder.start();
        try {
          if (adapt_now) workload.adapt(config, run, recorder);
          workload.load(config, run, recorder);
          outcome = workload.infer(config, run, plan.requests_per_run, plan.evaluation_passes, recorder);
        } catch (...) {
          workload.teardown(config, run);
          try {
            trace = recorder.finish();
          } catch (...) {
          }
          throw;
        }
        workload.teardown(config, run);
        trace = recorder.finish();
        if (options.trace_out) {
          const auto dir = *options.trace_out / Slug(config);
          std::filesystem::create_directories(dir);
          SaveTrace(dir / ("run-" + std::to_string(run) + ".trace"), trace);
        }
        record = BuildRecord(config, run, trace, outcome, *session.provider,
                             adapt_now ? std::nullopt : adapted_kwh, options.subtract_idle);
      } catch (const StoreError&) {
        throw;
      } catch (const std::exception& e) {
        store.mark_failed(config, run, e.what());
        ++summary.failed;
        log(config.id() + " run " + std::to_string(run) + " failed: " + e.what());
        continue;
      }
      store.append(record);
      if (adapt_now) adapted_kwh = record.E_train;
      ++summary.executed;
      log(config.id() + " run " + std::to_string(run) + " done");
    }
  }
  return summary;
}

RunAggregate AggregateRecords(const std::vector<LifecycleRecord>& records, const MetricOptions* metrics) {
  if (records.empty()) throw Error("no completed runs to aggregate");
  RunAggregate agg;
  agg.config = records.front().config;
  agg.n_runs = static_cast<int>(records.size());

  auto add = [&](const char* name, auto getter) {
    std::vector<double> xs;
    xs.reserve(records.size());
    for (const auto& r : records) xs.push_back(getter(r));
    agg.fields.push_back({name, stats::Summarize(xs)});
  };
  add("E_train", [](const LifecycleRecord& r) { return r.E_train; });
  add("E_load", [](const LifecycleRecord& r) { return r.E_load; });
  add("E_infer", [](const LifecycleRecord& r) { return r.E_infer; });
  add("T_put", [](const LifecycleRecord& r) { return r.T_put; });
  add("ttft_ms", [](const LifecycleRecord& r) { return r.ttft_ms.median; });
  add("ttft_p95_ms", [](const LifecycleRecord& r) { return r.ttft_ms.p95; });
  add("itl_ms", [](const LifecycleRecord& r) { return r.itl_ms.median; });
  add("itl_p95_ms", [](const LifecycleRecord& r) { return r.itl_ms.p95; });
  add("M_vram", [](const LifecycleRecord& r) { return r.M_vram; });
  add("S_task", [](const LifecycleRecord& r) { return r.S_task; });

  if (metrics) {
    std::vector<DeploymentMetrics> per_run;
    per_run.reserve(records.size());
    for (const auto& r : records) per_run.push_back(RunMetrics(r, *metrics));
    const bool always_breaks_even =
        std::all_of(per_run.begin(), per_run.end(), [](const DeploymentMetrics& d) { return d.N_break.has_value(); });
    auto add_metric = [&](const char* name, auto getter) {
      std::vector<double> xs;
      for (const auto& d : per_run) xs.push_back(getter(d));
      agg.fields.push_back({name, stats::Summarize(xs)});
    };
    // A configuration with any never-break-even run has no N_break field.
    if (always_breaks_even) {
      add_metric("N_break", [](const DeploymentMetrics& d) { return static_cast<double>(*d.N_break); });
    }
    add_metric("IPW", [](const DeploymentMetrics& d) { return d.IPW; });
    add_metric("rho_sys", [](const DeploymentMetrics& d) { return d.rho_sys; });
    add_metric("C_tax", [](const DeploymentMetrics& d) { return d.C_tax; });
  }
  return agg;
}

RunAggregate Aggregate(const RunStore& store, const ConfigKey& config, const MetricOptions* metrics) {
  auto records = store.records_for(config);
  if (records.empty()) throw Error("no done runs for configuration");
  return AggregateRecords(records, metrics);
}

std::vector<RunAggregate> AggregateAll(const RunStore& store, const MetricOptions* metrics) {
  std::vector<RunAggregate> out;
  for (const auto& c : store.configurations()) out.push_back(Aggregate(store, c.key(), metrics));
  return out;
}

}  // namespace lcbench
