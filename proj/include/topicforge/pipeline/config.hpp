#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topicforge/eval/experiment.hpp"
#include "topicforge/nn/dataset.hpp"
#include "topicforge/nn/models.hpp"

namespace topicforge::pipeline {

/// Sections of `key = value` lines, `[section]` headers, `#`/`;` comments.
struct IniFile {
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections;
};

IniFile parse_ini(std::string_view text);  // throws InputError on malformed lines

struct RunConfig {
    std::filesystem::path source;  // config file, empty when built in code

    // [paths]; relative paths resolve against the config file's directory.
    std::filesystem::path comments;
    std::filesystem::path bars;
    std::filesystem::path lexicon;
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> external_scores;
    std::filesystem::path stop_words;
    std::filesystem::path output;

    // [data]
    std::string ticker;

    // [sentiment]
    std::string engine = "lexicon";  // lexicon | external
    bool weight_by_length = false;

    // [topics]
    std::size_t k = 15;
    std::size_t out_dim = 5;
    std::size_t min_pts = 10;
    std::size_t min_cluster_size = 10;
    std::size_t min_df = 1;
    std::size_t epochs_umap = 200;
    std::uint64_t topic_seed = 42;
    std::size_t embedding_dim = 64;
    std::size_t top_words = 10;

    // [forecast]
    std::size_t lookback = 5;
    std::size_t epochs = 200;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<nn::Arch> models{nn::Arch::lstm, nn::Arch::cnn, nn::Arch::cnn_lstm, nn::Arch::gan};
    std::vector<nn::Variant> variants{nn::Variant::baseline, nn::Variant::sentiment, nn::Variant::topic_sentiment};
    nn::TopicMode topic_mode = nn::TopicMode::replace;
    double learning_rate = 1e-3;
    double gan_learning_rate = 2e-4;
    double gan_beta1 = 0.5;
    std::size_t batch_size = 0;
    bool non_saturating = false;
    std::size_t threads = 0;
    nn::ModelShape shape;

    // [report]
    std::string format = "both";  // markdown | csv | both

    bool needs_topics() const;
    eval::ExperimentConfig experiment() const;
    /// Canonical `key = value` text of every setting, used in reports and for
    /// hashing.
    std::string snapshot() const;
};

struct Validation {
    std::optional<RunConfig> config;  // set when there are no errors
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Reports every violated field, not just the first.
Validation validate_config_text(std::string_view text, const std::filesystem::path& base_dir);
Validation validate_config(const std::filesystem::path& path);  // throws InputError if unreadable

}  // namespace topicforge::pipeline
