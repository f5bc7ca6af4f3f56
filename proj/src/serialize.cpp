#include "lcbench/serialize.hpp"

namespace lcbench {
namespace {

constexpr int kSchemaVersion = 1;

template <typename T>
void GetOptional(const Json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    out = it->template get<T>();
  } else {
    out.reset();
  }
}

template <typename T>
void PutOptional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

Json UnitsFor(std::string_view type_name) {
  Json u = Json::object();
  if (type_name == "LifecycleRecord") {
    u["E_train"] = "kWh";
    u["E_load"] = "J";
    u["E_infer"] = "J/request";
    u["T_put"] = "tokens/s";
    u["ttft_ms"] = "ms";
    u["itl_ms"] = "ms";
    u["M_vram"] = "GB (2^30 bytes)";
    u["S_task"] = "task scale";
  } else if (type_name == "RunAggregate") {
    u["E_train"] = "kWh";
    u["E_load"] = "J";
    u["E_infer"] = "J/request";
    u["T_put"] = "tokens/s";
    u["M_vram"] = "GB";
    u["IPW"] = "score/J";
    u["rho_sys"] = "tokens/s/GB";
    u["C_tax"] = "ratio";
    u["N_break"] = "requests";
  } else if (type_name == "EconomicModel") {
    u["C_setup"] = "currency";
    u["C_api"] = "currency/request";
    u["electricity_price"] = "currency/kWh";
    u["carbon_intensity"] = "kg CO2/kWh";
    u["amortization"] = "currency/GPU-hour";
  }
  return u;
}

}  // namespace

void to_json(Json& j, const Configuration& c) {
  j = Json{{"family", ToString(c.family)},
           {"tier", ToString(c.tier)},
           {"task", ToString(c.task)},
           {"adaptation", ToString(c.adaptation)},
           {"model_id", c.model_id},
           {"precision_at_inference", ToString(c.precision_at_inference())}};
}

void from_json(const Json& j, Configuration& c) {
  c.family = ParseFamily(j.at("family").get<std::string>());
  c.tier = ParseTier(j.at("tier").get<std::string>());
  c.task = ParseTask(j.at("task").get<std::string>());
  c.adaptation = ParseAdaptation(j.at("adaptation").get<std::string>());
  c.model_id = j.at("model_id").get<std::string>();
  if (auto it = j.find("precision_at_inference"); it != j.end()) {
    if (ParsePrecision(it->get<std::string>()) != c.precision_at_inference()) {
      throw Error("precision_at_inference inconsistent with adaptation " +
                  std::string(ToString(c.adaptation)));
    }
  }
}

void to_json(Json& j, const StageSpan& s) {
  j = Json{{"stage", ToString(s.stage)}, {"start", s.start}, {"end", s.end}};
}

void from_json(const Json& j, StageSpan& s) {
  s.stage = ParseStage(j.at("stage").get<std::string>());
  s.start = j.at("start").get<Millis>();
  s.end = j.at("end").get<Millis>();
}

void to_json(Json& j, const PowerSample& s) { j = Json{{"t", s.t}, {"watts", s.watts}}; }

void from_json(const Json& j, PowerSample& s) {
  s.t = j.at("t").get<Millis>();
  s.watts = j.at("watts").get<double>();
}

void to_json(Json& j, const RequestTiming& r) {
  j = Json{{"submit", r.submit},
           {"first_token", r.first_token},
           {"token_times", r.token_times},
           {"tokens_out", r.tokens_out}};
}

void from_json(const Json& j, RequestTiming& r) {
  r.submit = j.at("submit").get<Millis>();
  r.first_token = j.at("first_token").get<Millis>();
  r.token_times = j.at("token_times").get<std::vector<Millis>>();
  r.tokens_out = j.at("tokens_out").get<std::int64_t>();
}

void to_json(Json& j, const LatencySummary& s) {
  j = Json{{"median", s.median}, {"p95", s.p95}, {"mean", s.mean}, {"std", s.std}};
}

void from_json(const Json& j, LatencySummary& s) {
  s.median = j.at("median").get<double>();
  s.p95 = j.at("p95").get<double>();
  s.mean = j.at("mean").get<double>();
  s.std = j.at("std").get<double>();
}

void to_json(Json& j, const LifecycleRecord& r) {
  j = Json{{"config", r.config},   {"E_train", r.E_train}, {"E_load", r.E_load},
           {"E_infer", r.E_infer}, {"T_put", r.T_put},     {"ttft_ms", r.ttft_ms},
           {"itl_ms", r.itl_ms},   {"M_vram", r.M_vram},   {"S_task", r.S_task},
           {"run_index", r.run_index}};
}

void from_json(const Json& j, LifecycleRecord& r) {
  r.config = j.at("config").get<Configuration>();
  r.E_train = j.at("E_train").get<double>();
  r.E_load = j.at("E_load").get<double>();
  r.E_infer = j.at("E_infer").get<double>();
  r.T_put = j.at("T_put").get<double>();
  r.ttft_ms = j.at("ttft_ms").get<LatencySummary>();
  r.itl_ms = j.at("itl_ms").get<LatencySummary>();
  r.M_vram = j.at("M_vram").get<double>();
  r.S_task = j.at("S_task").get<double>();
  r.run_index = j.at("run_index").get<int>();
}

void to_json(Json& j, const PrecisionScorePair& p) {
  j = Json{{"S_FP16", p.S_FP16}, {"S_INT4", p.S_INT4}, {"std_FP16", p.std_FP16}, {"std_INT4", p.std_INT4}};
}

void from_json(const Json& j, PrecisionScorePair& p) {
  p.S_FP16 = j.at("S_FP16").get<double>();
  p.S_INT4 = j.at("S_INT4").get<double>();
  p.std_FP16 = j.at("std_FP16").get<double>();
  p.std_INT4 = j.at("std_INT4").get<double>();
}

void to_json(Json& j, const EconomicModel& m) {
  j = Json{{"C_setup", m.C_setup},
           {"C_api", m.C_api},
           {"electricity_price", m.electricity_price},
           {"carbon_intensity", m.carbon_intensity},
           {"amortization", m.amortization}};
}

void from_json(const Json& j, EconomicModel& m) {
  m.C_setup = j.at("C_setup").get<double>();
  m.C_api = j.at("C_api").get<double>();
  m.electricity_price = j.at("electricity_price").get<double>();
  m.carbon_intensity = j.at("carbon_intensity").get<double>();
  m.amortization = j.value("amortization", 0.0);
}

void to_json(Json& j, const DeploymentMetrics& m) {
  j = Json::object();
  if (m.N_break) {
    j["N_break"] = *m.N_break;
  } else {
    j["N_break"] = "never";
  }
  j["IPW"] = m.IPW;
  j["rho_sys"] = m.rho_sys;
  j["C_tax"] = m.C_tax;
  PutOptional(j, "Q_ret", m.Q_ret);
  PutOptional(j, "speedup", m.speedup);
  PutOptional(j, "energy_savings", m.energy_savings);
  PutOptional(j, "std_delta", m.std_delta);
}

void from_json(const Json& j, DeploymentMetrics& m) {
  const auto& nb = j.at("N_break");
  if (nb.is_string()) {
    if (nb.get<std::string>() != "never") throw Error("N_break must be an integer or \"never\"");
    m.N_break.reset();
  } else {
    m.N_break = nb.get<std::int64_t>();
  }
  m.IPW = j.at("IPW").get<double>();
  m.rho_sys = j.at("rho_sys").get<double>();
  m.C_tax = j.at("C_tax").get<double>();
  GetOptional(j, "Q_ret", m.Q_ret);
  GetOptional(j, "speedup", m.speedup);
  GetOptional(j, "energy_savings", m.energy_savings);
  GetOptional(j, "std_delta", m.std_delta);
}

void to_json(Json& j, const FieldStats& s) {
  j = Json{{"mean", s.mean}, {"median", s.median}, {"std", s.std}, {"q25", s.q25}, {"q75", s.q75}};
}

void from_json(const Json& j, FieldStats& s) {
  s.mean = j.at("mean").get<double>();
  s.median = j.at("median").get<double>();
  s.std = j.at("std").get<double>();
  s.q25 = j.at("q25").get<double>();
  s.q75 = j.at("q75").get<double>();
}

void to_json(Json& j, const RunAggregate& a) {
  Json fields = Json::object();
  for (const auto& f : a.fields) fields[f.field] = f.stats;
  j = Json{{"config", a.config}, {"n_runs", a.n_runs}, {"fields", fields}};
}

void from_json(const Json& j, RunAggregate& a) {
  a.config = j.at("config").get<Configuration>();
  a.n_runs = j.at("n_runs").get<int>();
  a.fields.clear();
  for (const auto& [key, value] : j.at("fields").items()) {
    a.fields.push_back({key, value.get<FieldStats>()});
  }
}

std::string SchemaHeader(std::string_view type_name) {
  Json h{{"schema", std::string("lcbench.") + std::string(type_name)},
         {"version", kSchemaVersion},
         {"units", UnitsFor(type_name)}};
  return h.dump();
}

void CheckSchemaHeader(std::string_view line, std::string_view type_name) {
  Json h;
  try {
    h = Json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw Error("missing schema header");
  }
  const std::string expected = std::string("lcbench.") + std::string(type_name);
  if (!h.is_object() || h.value("schema", "") != expected) {
    throw Error("schema header mismatch: expected " + expected);
  }
  if (h.value("version", 0) != kSchemaVersion) {
    throw Error("unsupported schema version for " + expected);
  }
}

}  // namespace lcbench
