#pragma once
// JSON encodings shared by the HTTP API, the report store and the CLI.
// Percentages in chart bundles are rounded to one decimal here and nowhere
// else; results keep full double precision so they round-trip bitwise.

#include "snn/inference.hpp"
#include "snn/selftest.hpp"

#include <json.hpp>

namespace snn {

using Json = nlohmann::json;

double round_one_decimal(double value);

Json to_json(const DiagnosisResult& result);
DiagnosisResult result_from_json(const Json& j);

Json to_json(const ChartData& chart);
Json to_json(const OptimalProfile& profile);
Json to_json(const KnowledgeBase& kb);
Json to_json(const Violation& v);

// Fixed-width table of A, L and deviation per disease plus reference levels.
std::string format_result_table(const DiagnosisResult& result);
std::string format_profile_table(const OptimalProfile& profile);

}  // namespace snn
