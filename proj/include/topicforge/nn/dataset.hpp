#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "topicforge/indicators.hpp"
#include "topicforge/nn/scaling.hpp"

namespace topicforge::nn {

/// sample x step x feature, row-major.
struct Windows {
    std::size_t n = 0;
    std::size_t steps = 0;
    std::size_t features = 0;
    std::vector<double> data;

    std::size_t stride() const { return steps * features; }
    const double* sample(std::size_t i) const { return data.data() + i * stride(); }
    double at(std::size_t i, std::size_t step, std::size_t feature) const {
        return data[i * stride() + step * features + feature];
    }
};

enum class Variant { baseline, sentiment, topic_sentiment };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view s);  // accepts "topic" for topic_sentiment

/// How `score_topic` enters the topic variant.
enum class TopicMode { replace, add };

/// Input columns for a variant: the price/indicator columns, then `score`
/// and/or `score_topic`.
std::vector<std::string> variant_columns(Variant v, TopicMode mode = TopicMode::replace);
std::vector<std::string> feature_columns(bool with_score, bool with_topic_score);

struct WindowedDataset {
    Windows x_train;
    Windows x_test;
    std::vector<double> y_train;  // scaled adj_close
    std::vector<double> y_test;
    std::vector<Date> train_dates;  // target dates
    std::vector<Date> test_dates;
    std::size_t lookback = 0;
    std::vector<std::string> feature_names;
};

/// Sample t holds scaled rows [t - lookback + 1, t] and targets adj_close at
/// t + 1. The last `test_rows` targets form the test split.
WindowedDataset window_dataset(const indicators::FeatureTable& frame, const ScalerPair& scalers, std::size_t lookback);

WindowedDataset window_dataset(const indicators::FeatureTable& frame, const ScalerPair& scalers, std::size_t lookback,
                               bool with_score, bool with_topic_score);

}  // namespace topicforge::nn
