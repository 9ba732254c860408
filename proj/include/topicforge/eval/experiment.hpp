#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topicforge/common/dates.hpp"
#include "topicforge/eval/metrics.hpp"
#include "topicforge/indicators.hpp"
#include "topicforge/nn/dataset.hpp"
#include "topicforge/nn/models.hpp"
#include "topicforge/nn/train.hpp"

namespace topicforge::eval {

enum class Split { train, test };
std::string_view split_name(Split s);

struct MetricsRow {
    nn::Arch model = nn::Arch::lstm;
    nn::Variant variant = nn::Variant::baseline;
    std::string engine = "lexicon";
    Split split = Split::train;
    Metrics metrics;
};

struct ExperimentConfig {
    std::vector<nn::Arch> models{nn::Arch::lstm, nn::Arch::cnn, nn::Arch::cnn_lstm, nn::Arch::gan};
    std::vector<nn::Variant> variants{nn::Variant::baseline, nn::Variant::sentiment, nn::Variant::topic_sentiment};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t lookback = 5;
    nn::TrainOptions train;
    nn::ModelShape shape;
    nn::TopicMode topic_mode = nn::TopicMode::replace;
    std::string engine = "lexicon";
    std::size_t threads = 0;  // 0 = TOPICFORGE_THREADS or hardware concurrency
};

struct SeedRun {
    std::uint64_t seed = 0;
    Metrics train;
    Metrics test;
};

struct Cell {
    nn::Arch model = nn::Arch::lstm;
    nn::Variant variant = nn::Variant::baseline;
    std::vector<SeedRun> runs;  // in config seed order
    Metrics median_train;
    Metrics median_test;
    // Dumps from the run whose test RMSE sits at the median.
    std::uint64_t dump_seed = 0;
    std::vector<Date> train_dates, test_dates;
    std::vector<double> train_actual, test_actual;
    std::vector<double> train_pred, test_pred;
    std::vector<double> loss_curve;
    std::optional<nn::Model> model_state;  // the dump run's model
    nn::ScalerPair scalers;
    std::size_t gan_clamp_events = 0;  // summed over seeds

    std::string key() const;  // "<model>_<variant>"
};

struct ExperimentReport {
    std::vector<Cell> cells;  // models outer, variants inner, config order
    std::vector<MetricsRow> rows;
    std::vector<std::uint64_t> seeds;
    std::string engine = "lexicon";
    std::string config_snapshot;
};

double median(std::vector<double> values);

/// Recomputes every cell's medians and the report rows from the seed runs.
void summarize(ExperimentReport& report);

/// Threads to use: `requested` if non-zero, else TOPICFORGE_THREADS, else the
/// hardware concurrency.
std::size_t worker_count(std::size_t requested = 0);

/// Trains every (model x variant x seed) job on `frame`, which must carry the
/// `score` / `score_topic` columns its variants need.
ExperimentReport run_experiment(const indicators::FeatureTable& frame, const ExperimentConfig& config);

}  // namespace topicforge::eval
