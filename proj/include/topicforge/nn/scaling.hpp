#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "topicforge/indicators.hpp"

namespace topicforge::nn {

/// The last `test_rows` rows of every frame are held out.
inline constexpr std::size_t test_rows = 20;

struct MinMax {
    double min = 0.0;
    double max = 1.0;

    double transform(double x) const { return (x - min) / (max - min); }
    double inverse(double s) const { return min + s * (max - min); }

    friend bool operator==(const MinMax&, const MinMax&) = default;
};

/// Fits over `values`; throws InputError naming `column` when constant.
MinMax fit_min_max(std::span<const double> values, std::string_view column);

struct ScalerPair {
    MinMax target;                       // adj_close
    std::vector<std::string> names;      // feature columns, in input order
    std::vector<MinMax> features;

    const MinMax& feature(std::string_view name) const;  // throws InputError

    friend bool operator==(const ScalerPair&, const ScalerPair&) = default;
};

/// Fits both scalers on rows [0, rows - holdout) of `frame`, restricted to
/// `columns`.
ScalerPair fit_scalers(const indicators::FeatureTable& frame, std::span<const std::string> columns,
                       std::size_t holdout = test_rows);

}  // namespace topicforge::nn
