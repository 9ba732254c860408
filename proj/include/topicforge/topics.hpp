#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "topicforge/clusterer.hpp"
#include "topicforge/ingest.hpp"

namespace topicforge::topics {

using StopWords = std::unordered_set<std::string>;

/// One word per line; blank lines and `#` comments skipped; lowercased.
StopWords load_stop_words(const std::filesystem::path& path);

/// Lowercased maximal alphanumeric runs of length >= 2.
std::vector<std::string> tokenize(std::string_view text);

struct Vocabulary {
    std::vector<std::string> tokens;  // sorted, unique
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> doc_term_counts;  // per doc: (term, count)
    std::size_t min_df = 1;

    std::size_t size() const { return tokens.size(); }
    std::size_t index_of(std::string_view term) const;  // throws InputError if unknown
};

Vocabulary build_vocabulary(std::span<const std::string> corpus, const StopWords& stop_words, std::size_t min_df = 1);

/// Topic ids present in `labels` (outlier -1 excluded), ascending.
std::vector<int> topic_ids(std::span<const int> labels);

/// TF(t, c): occurrences of term t across the docs labeled c.
std::size_t class_tf(const Vocabulary& vocab, std::span<const int> labels, std::size_t term, int topic);

/// Number of topics whose merged document contains `term`.
std::size_t class_df(const Vocabulary& vocab, std::span<const int> labels, std::size_t term);

/// ln(N / (1 + DF(t))) with N the number of non-outlier topics.
double icf(const Vocabulary& vocab, std::span<const int> labels, std::size_t term);

/// Dense topic x term c-TF-IDF matrix; row r belongs to topic_ids(labels)[r].
struct CtfidfMatrix {
    std::vector<int> topics;
    std::size_t n_terms = 0;
    std::vector<double> values;  // topics.size() * n_terms
    std::vector<std::size_t> tf;  // raw class term counts, same layout
    std::vector<double> icf;      // per term

    double at(std::size_t row, std::size_t term) const { return values[row * n_terms + term]; }
    std::size_t row_of(int topic) const;  // throws InputError if unknown
};

CtfidfMatrix ctfidf(const Vocabulary& vocab, std::span<const int> labels);

struct TopicModel {
    std::vector<int> labels;  // per doc, -1 = outlier
    CtfidfMatrix weights;
    std::vector<std::string> terms;
    std::map<int, std::vector<std::pair<std::string, double>>> top_words;
    std::map<int, double> topic_sentiment;
    std::map<int, std::size_t> sizes;

    static constexpr int outlier_topic_id = -1;
};

/// The `n` heaviest terms of `topic`, ties broken alphabetically.
std::vector<std::pair<std::string, double>> top_words(const CtfidfMatrix& m, std::span<const std::string> terms,
                                                      int topic, std::size_t n = 10);

/// Mean compound of the member docs of every non-outlier topic.
std::map<int, double> topic_sentiment(std::span<const int> labels, std::span<const double> doc_compounds);

TopicModel build_topic_model(const Vocabulary& vocab, std::vector<int> labels, std::span<const double> doc_compounds,
                             std::size_t n_top_words = 10);

/// Per trading day: mean over that day's comments of the comment's topic
/// sentiment, or the comment's own compound when it is an outlier. Comments
/// are looked up by id in `doc_index`.
struct DailyTopicScore {
    Date date;
    double value = 0.0;
    bool empty = true;
};
std::vector<DailyTopicScore> daily_topic_score(const ingest::AlignedCorpus& aligned, const TopicModel& model,
                                               std::span<const double> doc_compounds,
                                               const std::unordered_map<std::string, std::size_t>& doc_index);

std::string topic_report_csv(const TopicModel& model);
std::string assignments_csv(const TopicModel& model, std::span<const std::string> doc_ids);

}  // namespace topicforge::topics
