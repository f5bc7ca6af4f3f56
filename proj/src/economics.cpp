#include "lcbench/economics.hpp"

#include <cmath>

#include "lcbench/metrics.hpp"
#include "lcbench/text.hpp"

namespace lcbench {

void ValidateEconomicModel(const EconomicModel& m) {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(std::string("economic model: ") + name + " must be >= 0");
  };
  check(m.C_setup, "C_setup");
  check(m.C_api, "C_api");
  check(m.electricity_price, "electricity_price");
  check(m.carbon_intensity, "carbon_intensity");
  check(m.amortization, "amortization");
  if (!(m.C_api > 0.0)) throw Error("economic model: C_api must be > 0");
}

EconomicModel ParseEconomicModel(const KeyedText& text) {
  EconomicModel m;
  m.electricity_price = text.require_double("electricity_price");
  m.C_api = text.require_double("C_api");
  m.C_setup = text.get_double("C_setup", 0.0);
  m.carbon_intensity = text.get_double("carbon_intensity", 0.0);
  m.amortization = text.get_double("amortization", 0.0);
  ValidateEconomicModel(m);
  return m;
}

EconomicModel LoadEconomicModel(const std::filesystem::path& path) {
  return ParseEconomicModel(KeyedText::Load(path));
}

std::string WriteEconomicModel(const EconomicModel& m) {
  std::string out;
  out += "electricity_price = " + FormatShortest(m.electricity_price) + "  # currency per kWh\n";
  out += "C_api = " + FormatShortest(m.C_api) + "  # currency per request\n";
  out += "C_setup = " + FormatShortest(m.C_setup) + "  # currency\n";
  out += "carbon_intensity = " + FormatShortest(m.carbon_intensity) + "  # kg CO2 per kWh\n";
  out += "amortization = " + FormatShortest(m.amortization) + "  # currency per GPU-hour\n";
  return out;
}

double CostOfEnergy(double kwh, const EconomicModel& m) {
  if (!(kwh >= 0.0)) throw Error("energy must be >= 0");
  return kwh * m.electricity_price;
}

CostBreakdown LifecycleCosts(const LifecycleRecord& r, const EconomicModel& m, double wall_hours,
                             double request_seconds) {
  if (wall_hours < 0.0) throw Error("wall_hours must be >= 0");
  if (request_seconds < 0.0) throw Error("request_seconds must be >= 0");
  const double infer_kwh = JoulesToKwh(r.E_infer);
  CostBreakdown c;
  c.C_train = CostOfEnergy(r.E_train, m) + m.amortization * wall_hours;
  c.C_setup = m.C_setup;
  c.C_infer = CostOfEnergy(infer_kwh, m) + m.amortization * (request_seconds / 3600.0);
  c.carbon_train = r.E_train * m.carbon_intensity;
  c.carbon_per_req = infer_kwh * m.carbon_intensity;
  return c;
}

double MetricOptions::alpha_for(Task t) const {
  if (auto it = alpha.find(t); it != alpha.end()) return it->second;
  return 1.0;
}

DeploymentMetrics RunMetrics(const LifecycleRecord& r, const MetricOptions& opts) {
  const CostBreakdown costs = LifecycleCosts(r, opts.economics, opts.train_wall_hours, opts.request_seconds);
  DeploymentMetrics d;
  d.N_break = BreakEvenRequests(costs.C_train, costs.C_setup, opts.economics.C_api, costs.C_infer);
  if (r.E_infer > 0.0) {
    d.IPW = IntelligencePerWatt({r.S_task, TaskScaleMax(r.config.task), opts.alpha_for(r.config.task), r.E_infer});
    d.C_tax = ColdStartTax(r.E_load, r.E_infer);
  }
  if (r.M_vram > 0.0) d.rho_sys = SystemDensity(r.T_put, r.M_vram);
  return d;
}

MetricOptions ParseMetricOptions(const KeyedText& text) {
  MetricOptions o;
  o.economics = ParseEconomicModel(text);
  for (const auto& [task, value] : text.with_prefix("alpha.")) o.alpha[ParseTask(task)] = ParseDouble(value);
  o.train_wall_hours = text.get_double("train_wall_hours", 0.0);
  o.request_seconds = text.get_double("request_seconds", 0.0);
  if (o.train_wall_hours < 0 || o.request_seconds < 0) throw Error("wall times must be >= 0");
  return o;
}

MetricOptions LoadMetricOptions(const std::filesystem::path& path) { return ParseMetricOptions(KeyedText::Load(path)); }

}  // namespace lcbench
