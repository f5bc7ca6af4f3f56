// lcbench: plan, run and analyze lifecycle deployment sweeps.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lcbench/analysis.hpp"
#include "lcbench/live.hpp"
#include "lcbench/replay.hpp"
#include "lcbench/report.hpp"
#include "lcbench/serialize.hpp"
#include "lcbench/sweep.hpp"
#include "lcbench/text.hpp"
#include "lcbench/trace_io.hpp"

namespace {

using namespace lcbench;

struct RunArgs {
  std::string plan_path;
  std::string store_path;
  std::string provider = "replay";
  std::string replay_dir;
  std::string trace_out;
  std::string endpoint;
  int requests = 0;
  int max_tokens = 0;
  Millis period = kDefaultPeriodMs;
  bool subtract_idle = false;
  bool retry_failed = false;
};

struct AnalysisArgs {
  std::string store_path;
  std::string economics_path;
  std::string config_id;
  std::string out_path;
};

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    WriteFile(out_path, text);
  }
}

int DoRun(const RunArgs& args, bool resume) {
  auto plan_text = KeyedText::Load(args.plan_path);
  auto plan = ParsePlan(plan_text);
  if (args.requests > 0) plan.requests_per_run = args.requests;

  const bool exists = std::filesystem::exists(args.store_path);
  if (resume && !exists) throw Error("no store to resume at " + args.store_path);
  auto store = RunStore::Open(args.store_path);
  if (!resume && (store.size() > 0 || store.failed_count() > 0)) {
    throw Error("store " + args.store_path + " already holds runs; use resume");
  }

  std::unique_ptr<Workload> workload;
  std::unique_ptr<ProviderSource> providers;
  if (args.provider == "replay") {
    if (args.replay_dir.empty()) throw Error("--replay-dir is required with --provider replay");
    workload = std::make_unique<ReplayWorkload>(args.replay_dir);
    providers = std::make_unique<ReplayProviderSource>(args.replay_dir);
  } else if (args.provider == "live") {
    auto live = ParseLiveWorkloadConfig(plan_text);
    if (!args.endpoint.empty()) live.endpoint = args.endpoint;
    if (args.max_tokens > 0) live.max_tokens = args.max_tokens;
    workload = std::make_unique<LiveWorkload>(std::move(live));
    providers = std::make_unique<LiveProviderSource>();
  } else {
    throw Error("unknown provider '" + args.provider + "' (expected live or replay)");
  }

  ExecuteOptions options;
  options.period = args.period;
  options.subtract_idle = args.subtract_idle;
  options.retry_failed = args.retry_failed;
  if (!args.trace_out.empty()) options.trace_out = args.trace_out;
  options.log = [](const std::string& msg) { std::cerr << msg << "\n"; };
  const auto summary = Execute(plan, *workload, *providers, store, options);
  std::cout << "executed " << summary.executed << ", skipped " << summary.skipped << ", failed " << summary.failed
            << "\n";
  return summary.failed > 0 ? 2 : 0;
}

std::vector<RunAggregate> LoadAggregates(const AnalysisArgs& args) {
  if (!std::filesystem::exists(args.store_path)) throw Error("no store at " + args.store_path);
  const auto store = RunStore::Open(args.store_path);
  std::optional<MetricOptions> metrics;
  if (!args.economics_path.empty()) metrics = LoadMetricOptions(args.economics_path);
  const MetricOptions* m = metrics ? &*metrics : nullptr;
  if (!args.config_id.empty()) return {Aggregate(store, ParseConfigId(args.config_id).key(), m)};
  auto all = AggregateAll(store, m);
  if (all.empty()) throw Error("store has no done runs");
  return all;
}

void AddAnalysisOptions(CLI::App* cmd, AnalysisArgs& a, bool with_config = false) {
  cmd->add_option("--store", a.store_path, "Run store (JSON lines)")->required();
  cmd->add_option("--economics", a.economics_path, "Economic model / metric options file");
  cmd->add_option("--out", a.out_path, "Output file (default: stdout)");
  if (with_config) cmd->add_option("--config-id", a.config_id, "Single configuration, e.g. LLaMA/Micro/Chat/LoRA-FP16");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifecycle deployment benchmarking: energy, latency and economics of adapted LLMs"};
  app.require_subcommand(1);

  std::string plan_path;
  auto* plan_cmd = app.add_subcommand("plan", "List the configurations of a sweep plan");
  plan_cmd->add_option("--config", plan_path, "Plan file")->required();

  RunArgs run_args;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", run_args.plan_path, "Plan file")->required();
    cmd->add_option("--store", run_args.store_path, "Run store (JSON lines)")->required();
    cmd->add_option("--provider", run_args.provider, "Telemetry and workload source")
        ->check(CLI::IsMember({"live", "replay"}));
    cmd->add_option("--replay-dir", run_args.replay_dir, "Replay bundle root");
    cmd->add_option("--trace-out", run_args.trace_out, "Directory for per-run traces");
    cmd->add_option("--endpoint", run_args.endpoint, "Streaming completion endpoint URL (live)");
    cmd->add_option("--requests", run_args.requests, "Requests per run (overrides the plan)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-tokens", run_args.max_tokens, "Max tokens per request (live)")->check(CLI::PositiveNumber);
    cmd->add_option("--period", run_args.period, "Sampling period in ms")->check(CLI::PositiveNumber);
    cmd->add_flag("--subtract-idle", run_args.subtract_idle, "Report energy above the idle baseline");
  };
  auto* run_cmd = app.add_subcommand("run", "Execute a sweep into a new store");
  add_run_options(run_cmd);
  auto* resume_cmd = app.add_subcommand("resume", "Execute the pending runs of an existing store");
  add_run_options(resume_cmd);
  resume_cmd->add_flag("--retry-failed", run_args.retry_failed, "Re-run runs marked failed");

  AnalysisArgs analysis;
  auto* agg_cmd = app.add_subcommand("aggregate", "Per-configuration statistics as JSON lines");
  AddAnalysisOptions(agg_cmd, analysis, true);

  std::string format = "markdown";
  auto* report_cmd = app.add_subcommand("report", "Emit report tables");
  AddAnalysisOptions(report_cmd, analysis);
  report_cmd->add_option("--format", format, "markdown, csv or json");

  std::string figure;
  std::string trace_path;
  AnalysisArgs plot;
  auto* plot_cmd = app.add_subcommand("plotdata", "Emit columnar plot data for one figure");
  plot_cmd->add_option("--figure", figure, "roi_quadrant, density, pareto, coldstart, fidelity or power")
      ->required();
  plot_cmd->add_option("--store", plot.store_path, "Run store (JSON lines)");
  plot_cmd->add_option("--economics", plot.economics_path, "Economic model / metric options file");
  plot_cmd->add_option("--trace", trace_path, "Trace file (power figure)");
  plot_cmd->add_option("--out", plot.out_path, "Output file (default: stdout)");

  std::string x_field = "T_put", y_field = "E_infer";
  bool minimize_x = false, maximize_y = false;
  auto* frontier_cmd = app.add_subcommand("frontier", "Pareto frontier over two aggregate fields (medians)");
  AddAnalysisOptions(frontier_cmd, analysis);
  frontier_cmd->add_option("--x", x_field, "Field on the x axis");
  frontier_cmd->add_option("--y", y_field, "Field on the y axis");
  frontier_cmd->add_flag("--minimize-x", minimize_x, "Smaller x is better");
  frontier_cmd->add_flag("--maximize-y", maximize_y, "Larger y is better");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan_cmd) {
      const auto configs = EnumeratePlan(LoadPlan(plan_path));
      for (const auto& c : configs) std::cout << c.id() << " " << c.model_id << "\n";
      std::cout << configs.size() << " configurations\n";
      return 0;
    }
    if (*run_cmd) return DoRun(run_args, false);
    if (*resume_cmd) return DoRun(run_args, true);
    if (*agg_cmd) {
      std::string out = SchemaHeader("RunAggregate") + "\n";
      for (const auto& a : LoadAggregates(analysis)) out += Encode(a) + "\n";
      Emit(out, analysis.out_path);
      return 0;
    }
    if (*report_cmd) {
      Emit(EmitReport(LoadAggregates(analysis), ParseReportFormat(format)), analysis.out_path);
      return 0;
    }
    if (*plot_cmd) {
      const auto fig = ParsePlotFigure(figure);
      if (fig == PlotFigure::Power) {
        if (trace_path.empty()) throw Error("--trace is required for the power figure");
        Emit(EmitPowerPlotData(LoadTrace(trace_path)), plot.out_path);
      } else {
        if (plot.store_path.empty()) throw Error("--store is required for figure " + figure);
        Emit(EmitPlotData(LoadAggregates(plot), fig), plot.out_path);
      }
      return 0;
    }
    if (*frontier_cmd) {
      std::vector<FrontierPoint> points;
      for (const auto& a : LoadAggregates(analysis)) {
        points.push_back({a.config.id(), a.at(x_field).median, a.at(y_field).median});
      }
      std::string out = "config_id " + x_field + " " + y_field + "\n";
      for (const auto& p : ParetoFrontier(points, !minimize_x, !maximize_y)) {
        out += p.config_id + " " + FormatShortest(p.x) + " " + FormatShortest(p.y) + "\n";
      }
      Emit(out, analysis.out_path);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
