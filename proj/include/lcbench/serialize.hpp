#pragma once

// Canonical keyed-text serialization of the domain types.
//
// Each value encodes to a single-line JSON object whose keys are the field
// names of the type. Stores write a schema header line first that names the
// type and the unit of every numeric field.

#include <string>
#include <string_view>

#include "json.hpp"
#include "lcbench/types.hpp"

namespace lcbench {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const Configuration& c);
void from_json(const Json& j, Configuration& c);
void to_json(Json& j, const StageSpan& s);
void from_json(const Json& j, StageSpan& s);
void to_json(Json& j, const PowerSample& s);
void from_json(const Json& j, PowerSample& s);
void to_json(Json& j, const RequestTiming& r);
void from_json(const Json& j, RequestTiming& r);
void to_json(Json& j, const LatencySummary& s);
void from_json(const Json& j, LatencySummary& s);
void to_json(Json& j, const LifecycleRecord& r);
void from_json(const Json& j, LifecycleRecord& r);
void to_json(Json& j, const PrecisionScorePair& p);
void from_json(const Json& j, PrecisionScorePair& p);
void to_json(Json& j, const EconomicModel& m);
void from_json(const Json& j, EconomicModel& m);
void to_json(Json& j, const DeploymentMetrics& m);
void from_json(const Json& j, DeploymentMetrics& m);
void to_json(Json& j, const FieldStats& s);
void from_json(const Json& j, FieldStats& s);
void to_json(Json& j, const RunAggregate& a);
void from_json(const Json& j, RunAggregate& a);

template <typename T>
std::string Encode(const T& value) {
  Json j = value;
  return j.dump();
}

template <typename T>
T Decode(std::string_view line) {
  try {
    return Json::parse(line).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("decode failed: ") + e.what());
  }
}

/// Schema header for a record-per-line file holding values of `type_name`.
std::string SchemaHeader(std::string_view type_name);

/// Throws Error unless `line` is a schema header for `type_name`.
void CheckSchemaHeader(std::string_view line, std::string_view type_name);

}  // namespace lcbench
