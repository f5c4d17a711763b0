#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fbcp/evaluation.hpp"
#include "fbcp/model.hpp"

namespace fbcp {

inline constexpr int kReportVersion = 1;

nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const MetricsReport& metrics);
nlohmann::json to_json(const std::vector<SweepRow>& rows);

/// Fixed-width text table, one line per condition.
std::string format_table(const std::vector<SweepRow>& rows);

std::string describe_noise(const NoiseSpec& noise);

}  // namespace fbcp
