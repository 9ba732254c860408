#include "topicforge/nn/dataset.hpp"

#include "topicforge/common/error.hpp"

namespace topicforge::nn {

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::baseline: return "baseline";
        case Variant::sentiment: return "sentiment";
        case Variant::topic_sentiment: return "topic_sentiment";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    if (s == "baseline") return Variant::baseline;
    if (s == "sentiment") return Variant::sentiment;
    if (s == "topic_sentiment" || s == "topic") return Variant::topic_sentiment;
    throw InputError("unknown variant '" + std::string(s) + "' (expected baseline, sentiment or topic_sentiment)");
}

std::vector<std::string> feature_columns(bool with_score, bool with_topic_score) {
    std::vector<std::string> cols(std::begin(indicators::feature_columns), std::end(indicators::feature_columns));
    if (with_score) cols.emplace_back("score");
    if (with_topic_score) cols.emplace_back("score_topic");
    return cols;
}

std::vector<std::string> variant_columns(Variant v, TopicMode mode) {
    switch (v) {
        case Variant::baseline: return feature_columns(false, false);
        case Variant::sentiment: return feature_columns(true, false);
        case Variant::topic_sentiment: return feature_columns(mode == TopicMode::add, true);
    }
    return {};
}

WindowedDataset window_dataset(const indicators::FeatureTable& frame, const ScalerPair& scalers,
                               std::size_t lookback) {
    if (lookback == 0) throw InputError("window_dataset: lookback must be >= 1");
    const std::size_t rows = frame.rows();
    if (rows < lookback + test_rows + 1)
        throw InputError("window_dataset: need at least " + std::to_string(lookback + test_rows + 1) +
                         " rows for lookback " + std::to_string(lookback) + ", got " + std::to_string(rows));
    const std::size_t nf = scalers.names.size();
    // Scaled copy of the selected columns, row-major.
    std::vector<double> scaled(rows * nf);
    for (std::size_t c = 0; c < nf; ++c) {
        const auto& col = frame.column(scalers.names[c]);
        for (std::size_t r = 0; r < rows; ++r) scaled[r * nf + c] = scalers.features[c].transform(col[r]);
    }
    const auto& adj = frame.column("adj_close");

    WindowedDataset d;
    d.lookback = lookback;
    d.feature_names = scalers.names;
    const std::size_t samples = rows - lookback;
    const std::size_t n_train = samples - test_rows;
    for (Windows* w : {&d.x_train, &d.x_test}) {
        w->steps = lookback;
        w->features = nf;
    }
    d.x_train.n = n_train;
    d.x_test.n = test_rows;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t t = s + lookback - 1;  // last input row
        const bool test = s >= n_train;
        Windows& w = test ? d.x_test : d.x_train;
        w.data.insert(w.data.end(), scaled.begin() + static_cast<std::ptrdiff_t>((t + 1 - lookback) * nf),
                      scaled.begin() + static_cast<std::ptrdiff_t>((t + 1) * nf));
        (test ? d.y_test : d.y_train).push_back(scalers.target.transform(adj[t + 1]));
        (test ? d.test_dates : d.train_dates).push_back(frame.dates[t + 1]);
    }
    return d;
}

WindowedDataset window_dataset(const indicators::FeatureTable& frame, const ScalerPair& scalers, std::size_t lookback,
                               bool with_score, bool with_topic_score) {
    const auto want = feature_columns(with_score, with_topic_score);
    if (want != scalers.names) throw InputError("window_dataset: scalers were fitted for a different column set");
    return window_dataset(frame, scalers, lookback);
}

}  // namespace topicforge::nn
