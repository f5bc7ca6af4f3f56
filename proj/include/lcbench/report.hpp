#pragma once

// Report tables (markdown / csv / json) and columnar plot data.

#include <optional>
#include <string>
#include <vector>

#include "lcbench/analysis.hpp"
#include "lcbench/types.hpp"

namespace lcbench {

enum class ReportFormat { Markdown, Csv, Json };
ReportFormat ParseReportFormat(std::string_view s);  // markdown|markdown-table|md|csv|json

// --- Table rows (raw values; formatting happens at emission) ---------------

// Per family and size, pooled over the INT4-inference configurations (all
// configurations when none is INT4) as the mean of per-configuration medians.
struct DeploymentRow {
  Family family = Family::LLaMA;
  Tier tier = Tier::Micro;
  std::optional<double> N_break;  // nullopt: absent or never
  bool never = false;
  std::optional<double> IPW, rho_sys, C_tax;
  std::optional<double> Q_ret;  // pooled over tasks
};

struct AdaptationEnergyRow {
  Configuration config;
  FieldStats E_train;             // kWh
  std::optional<double> ratio;    // against LoRA-FP16 of the same family/size/task
};

struct InferenceRow {
  Configuration fp16, int4;
  double T_fp16 = 0, T_int4 = 0;  // median tok/s
  double E_fp16 = 0, E_int4 = 0;  // median J/request
  double speedup = 0, savings = 0;
};

// Per family and task, pooled over sizes.
struct RobustnessRow {
  Family family = Family::LLaMA;
  Task task = Task::Summarization;
  PrecisionScorePair pooled;      // mean score and mean std over sizes
  double retention = 0;           // mean of per-size retentions
  std::optional<double> std_delta;
};

struct TaskQualityRow {
  Configuration fp16, int4;
  PrecisionScorePair scores;
  double retention = 0;
};

struct ReportTables {
  std::vector<DeploymentRow> deployment;
  std::vector<AdaptationEnergyRow> adaptation_energy;
  std::vector<InferenceRow> inference;
  std::vector<RobustnessRow> robustness;
  std::vector<TaskQualityRow> task_quality;
};

ReportTables BuildReportTables(const std::vector<RunAggregate>& aggregates);

// "0.039 [0.025-0.045]"
std::string FormatEnergyWithIqr(const FieldStats& kwh);
// "6.4×" / "1.94×"
std::string FormatRatio(double r, int decimals);
// "100.1%" / "+45.6%"
std::string FormatPercent(double pct, bool sign = false);

/// Throws on empty input. Output is independent of input order.
std::string EmitReport(const std::vector<RunAggregate>& aggregates, ReportFormat format);

/// Inverse of the csv report: one aggregate per data row.
std::vector<RunAggregate> ParseReportCsv(std::string_view csv);

/// Cells of the markdown table under the `## <title>` heading, header row
/// excluded.
std::vector<std::vector<std::string>> ParseMarkdownTable(std::string_view markdown, std::string_view title);

// Markdown section titles.
inline constexpr std::string_view kDeploymentTitle = "Deployment metrics";
inline constexpr std::string_view kAdaptationTitle = "Adaptation energy";
inline constexpr std::string_view kInferenceTitle = "Inference efficiency";
inline constexpr std::string_view kRobustnessTitle = "Quantization robustness";
inline constexpr std::string_view kTaskQualityTitle = "Task quality";

// --- Plot data --------------------------------------------------------------

enum class PlotFigure { RoiQuadrant, Density, Pareto, ColdStart, Fidelity, Power };
PlotFigure ParsePlotFigure(std::string_view s);  // roi_quadrant|density|pareto|coldstart|fidelity|power
std::string_view ToString(PlotFigure f);

/// Column names for each figure.
std::vector<std::string> PlotColumns(PlotFigure f);

/// CSV with a leading `# schema:` line. Throws naming the missing fields
/// (and their configurations). The power figure needs a trace; use
/// EmitPowerPlotData.
std::string EmitPlotData(const std::vector<RunAggregate>& aggregates, PlotFigure figure,
                         std::optional<RoiThresholds> thresholds = std::nullopt);

/// 1 s (by default) bucket means of a power trace.
std::string EmitPowerPlotData(const TelemetryTrace& trace, Millis bucket_ms = 1000);

}  // namespace lcbench
