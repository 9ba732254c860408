#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topicforge/common/dates.hpp"
#include "topicforge/ingest.hpp"

namespace topicforge::indicators {

/// Undefined (warm-up) entries are quiet NaN.
using Series = std::vector<double>;

inline constexpr double undefined = std::numeric_limits<double>::quiet_NaN();
inline bool defined(double v) { return !std::isnan(v); }

Series moving_average(std::span<const double> series, std::size_t window);

/// alpha = 2 / (span + 1), seeded with the first observation.
Series ema(std::span<const double> series, std::size_t span);

inline constexpr std::size_t macd_fast = 12;
inline constexpr std::size_t macd_slow = 26;

/// ema(12) - ema(26); the first 25 entries are undefined (slow warm-up).
Series macd(std::span<const double> series);

/// Population standard deviation over each trailing window.
Series rolling_std(std::span<const double> series, std::size_t window = 20);

struct Bands {
    Series upper;
    Series lower;
};
Bands bollinger(std::span<const double> ma20, std::span<const double> sd20, double k = 2.0);

/// m = x[i] - x[i-lag]; out = sign(m) * ln(1 + |m|). Unlike the plain log of
/// momentum this is defined for m <= 0, and it is not scale-homogeneous.
Series log_momentum(std::span<const double> series, std::size_t lag = 1);

struct FeatureOptions {
    std::size_t ema_span = 20;
    std::size_t momentum_lag = 1;
    double band_k = 2.0;
};

/// Column names in export order.
inline constexpr std::string_view feature_columns[] = {
    "open", "high", "low", "close", "adj_close", "volume", "ma7", "ma20",
    "macd", "sd20", "upper_band", "lower_band", "ema", "log_momentum"};

struct FeatureTable {
    std::vector<Date> dates;
    std::vector<std::pair<std::string, Series>> columns;
    std::size_t warmup_dropped = 0;

    const Series& column(std::string_view name) const;  // throws InputError
    std::size_t rows() const { return dates.size(); }
    std::string to_csv() const;
    static FeatureTable from_csv(std::string_view text);
};

/// Minimum bar count: MACD warm-up plus the 20-row test split.
inline constexpr std::size_t min_bars = 46;

FeatureTable build_features(std::span<const ingest::Bar> bars, const FeatureOptions& opts = {});

}  // namespace topicforge::indicators
