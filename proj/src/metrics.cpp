#include "lcbench/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lcbench {
namespace {

void RequireNonNegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw Error(std::string(name) + " must be finite and >= 0");
}

bool SameWorkload(const Configuration& a, const Configuration& b) {
  return a.family == b.family && a.tier == b.tier && a.task == b.task;
}

}  // namespace

BreakEven BreakEvenRequests(double C_train, double C_setup, double C_api, double C_infer) {
  RequireNonNegative(C_train, "C_train");
  RequireNonNegative(C_setup, "C_setup");
  RequireNonNegative(C_api, "C_api");
  RequireNonNegative(C_infer, "C_infer");
  if (!(C_api > C_infer)) return std::nullopt;
  const double fixed = C_train + C_setup;
  const double margin = C_api - C_infer;
  const double n = std::ceil(fixed / margin);
  if (n >= static_cast<double>(std::numeric_limits<std::int64_t>::max())) return std::nullopt;
  auto requests = static_cast<std::int64_t>(n);
  // Settle rounding at the crossover so the count satisfies the defining
  // inequality fixed <= requests * margin.
  while (requests > 0 && fixed <= static_cast<double>(requests - 1) * margin) --requests;
  while (fixed > static_cast<double>(requests) * margin) ++requests;
  return requests;
}

double IntelligencePerWatt(const IpwInput& in) {
  if (!(in.E_req > 0.0)) throw Error("IPW undefined: E_req must be > 0");
  if (!(in.task_scale_max > 0.0)) throw Error("task_scale_max must be > 0");
  if (!(in.alpha > 0.0)) throw Error("alpha must be > 0");
  if (!(in.S_task >= 0.0 && in.S_task <= in.task_scale_max)) {
    throw Error("S_task outside [0, task_scale_max]");
  }
  return (in.S_task / in.task_scale_max) * in.alpha / in.E_req;
}

double SystemDensity(double T_put, double M_vram) {
  if (!(M_vram > 0.0)) throw Error("system density undefined: M_vram must be > 0");
  RequireNonNegative(T_put, "T_put");
  return T_put / M_vram;
}

double ColdStartTax(double E_load, double E_infer) {
  if (!(E_infer > 0.0)) throw Error("cold-start tax undefined: E_infer must be > 0");
  RequireNonNegative(E_load, "E_load");
  return E_load / E_infer;
}

double QuantizationFidelity(const PrecisionScorePair& p) {
  if (!(p.S_FP16 > 0.0)) throw Error("quantization fidelity undefined: S_FP16 must be > 0");
  return p.S_INT4 / p.S_FP16 * 100.0;
}

double StdDelta(const PrecisionScorePair& p) {
  if (!(p.std_FP16 > 0.0)) throw Error("variance shift undefined: std_FP16 must be > 0");
  return (p.std_INT4 - p.std_FP16) / p.std_FP16 * 100.0;
}

SpeedupSavings SpeedupAndSavings(const LifecycleRecord& fp16, const LifecycleRecord& int4) {
  if (!SameWorkload(fp16.config, int4.config)) {
    throw Error("speedup compares mismatched configurations " + fp16.config.id() + " and " + int4.config.id());
  }
  if (!(fp16.E_infer > 0.0)) throw Error("FP16 E_infer must be > 0");
  if (!(fp16.T_put > 0.0)) throw Error("FP16 T_put must be > 0");
  return {int4.T_put / fp16.T_put, (1.0 - int4.E_infer / fp16.E_infer) * 100.0};
}

double AdaptationEnergyRatio(const LifecycleRecord& lora, const LifecycleRecord& qlora) {
  if (!SameWorkload(lora.config, qlora.config)) {
    throw Error("energy ratio compares mismatched configurations " + lora.config.id() + " and " + qlora.config.id());
  }
  if (!(lora.E_train > 0.0)) throw Error("LoRA E_train must be > 0");
  return qlora.E_train / lora.E_train;
}

double RoundTo(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace lcbench
