#pragma once

// Energy to currency and carbon, and per-run deployment metrics.

#include <filesystem>
#include <map>
#include <string>

#include "lcbench/keyed_text.hpp"
#include "lcbench/types.hpp"

namespace lcbench {

struct CostBreakdown {
  double C_train = 0.0;         // currency
  double C_setup = 0.0;         // currency
  double C_infer = 0.0;         // currency per request
  double carbon_train = 0.0;    // kg CO2
  double carbon_per_req = 0.0;  // kg CO2 per request

  bool operator==(const CostBreakdown&) const = default;
};

/// Throws Error unless every field is >= 0 and C_api > 0.
void ValidateEconomicModel(const EconomicModel& m);

// Economic model file (keyed text):
//   electricity_price = 0.30   # currency per kWh
//   C_api = 0.01               # currency per request
//   C_setup = 1.0              # currency
//   carbon_intensity = 0.4     # kg CO2 per kWh
//   amortization = 0           # currency per GPU-hour
EconomicModel ParseEconomicModel(const KeyedText& text);
EconomicModel LoadEconomicModel(const std::filesystem::path& path);
std::string WriteEconomicModel(const EconomicModel& m);

double CostOfEnergy(double kwh, const EconomicModel& m);

/// `wall_hours` is the adaptation wall time charged at the amortization
/// rate; `request_seconds` is the wall time of one request.
CostBreakdown LifecycleCosts(const LifecycleRecord& r, const EconomicModel& m, double wall_hours,
                             double request_seconds = 0.0);

struct MetricOptions {
  EconomicModel economics;
  std::map<Task, double> alpha;  // IPW scaling per task; 1 when absent
  double train_wall_hours = 0.0;
  double request_seconds = 0.0;

  double alpha_for(Task t) const;
};

/// Economic model keys plus optional `alpha.<Task>`, `train_wall_hours`
/// and `request_seconds`.
MetricOptions ParseMetricOptions(const KeyedText& text);
MetricOptions LoadMetricOptions(const std::filesystem::path& path);

/// N_break, IPW, rho_sys and C_tax of a single run. Metrics whose
/// denominators are zero (no inference data) are reported as 0.
DeploymentMetrics RunMetrics(const LifecycleRecord& r, const MetricOptions& opts);

}  // namespace lcbench
