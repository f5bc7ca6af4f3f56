#pragma once

// The five deployment metrics and the FP16-vs-INT4 comparison metrics.
// All functions are pure.

#include "lcbench/types.hpp"

namespace lcbench {

struct IpwInput {
  double S_task = 0.0;
  double task_scale_max = 1.0;
  double alpha = 1.0;  // task-complexity scaling factor
  double E_req = 0.0;  // J per request
};

struct SpeedupSavings {
  double speedup = 1.0;
  double energy_savings = 0.0;  // percent
};

/// Requests needed before local serving undercuts the API:
/// ceil((C_train + C_setup) / (C_api - C_infer)), or never when the API is
/// not more expensive per request.
BreakEven BreakEvenRequests(double C_train, double C_setup, double C_api, double C_infer);

/// Normalized task score times alpha, per joule.
double IntelligencePerWatt(const IpwInput& in);

/// Sustained tokens/s per GB of allocated device memory.
double SystemDensity(double T_put, double M_vram);

/// Load energy as a multiple of one steady-state request's energy.
double ColdStartTax(double E_load, double E_infer);

/// INT4 score as a percentage of the FP16 score (full precision).
double QuantizationFidelity(const PrecisionScorePair& p);

/// Relative change (%) of the score standard deviation from FP16 to INT4.
double StdDelta(const PrecisionScorePair& p);

SpeedupSavings SpeedupAndSavings(const LifecycleRecord& fp16, const LifecycleRecord& int4);

/// QLoRA over LoRA adaptation energy.
double AdaptationEnergyRatio(const LifecycleRecord& lora, const LifecycleRecord& qlora);

/// Rounds a percent (or any report value) half away from zero.
double RoundTo(double v, int decimals);

}  // namespace lcbench
