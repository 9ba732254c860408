#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "topicforge/common/dates.hpp"
#include "topicforge/indicators.hpp"

namespace topicforge::pipeline {

/// One value per trading day that received comments.
using DailySeries = std::map<Date, double>;

std::string daily_csv(std::string_view column, const DailySeries& series);
DailySeries parse_daily_csv(std::string_view text, std::string_view column);

/// Appends `score` and, when given, `score_topic` to the indicator table,
/// joined on date. Days without comments get the neutral 0.
indicators::FeatureTable build_frame(const indicators::FeatureTable& features, const DailySeries& score,
                                     const std::optional<DailySeries>& score_topic);

}  // namespace topicforge::pipeline
