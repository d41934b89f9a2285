#pragma once

#include <string>

#include "json.hpp"

#include "catpose/evaluation.hpp"

namespace catpose {

// Rows are categories followed by "mAP", columns the seven thresholds.
// Undefined entries print as "-".
std::string format_report_table(const EvaluationReport& report);

nlohmann::json report_to_json(const EvaluationReport& report);

// "category,threshold,ap" with an empty ap field when undefined.
std::string curves_to_csv(const std::vector<CurvePoint>& curve);

}  // namespace catpose
