#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace topicforge::sentiment {

/// Rule constants of the lexicon engine, all in one place.
struct RuleConfig {
    double normalization_alpha = 15.0;
    double negation_scalar = -0.74;
    double caps_increment = 0.733;
    double exclamation_increment = 0.292;
    int max_exclamations = 4;
    int negation_window = 3;
    int booster_window = 2;
    double positive_threshold = 0.05;
    double negative_threshold = -0.05;
};

struct Lexicon {
    std::unordered_map<std::string, double> entries;  // lowercase token -> valence in [-4, 4]
    std::unordered_map<std::string, double> boosters;
    std::unordered_set<std::string> negators;
    std::vector<std::string> warnings;
};

/// Reads `token<TAB>valence` lines from `path`, plus the sibling files
/// `boosters.tsv` (`token<TAB>increment`) and `negators.txt` (one per line).
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon load_lexicon(const std::filesystem::path& lexicon, const std::filesystem::path& boosters,
                     const std::filesystem::path& negators);

struct SentimentScore {
    double pos = 0.0;
    double neu = 1.0;
    double neg = 0.0;
    double compound = 0.0;
};

/// compound = S / sqrt(S^2 + alpha)
double normalize(double sum, double alpha = 15.0);

SentimentScore score_comment(std::string_view text, const Lexicon& lexicon, const RuleConfig& rules = {});

/// Sum of rule-adjusted valences before normalization. Exposed for tests.
double valence_sum(std::string_view text, const Lexicon& lexicon, const RuleConfig& rules = {});

enum class Label { Negative, Neutral, Positive };
Label classify(double compound, const RuleConfig& rules = {});
std::string_view label_name(Label l);

struct DailyScore {
    double value = 0.0;
    bool empty = true;  // no comments that day; value is the neutral 0
};

/// Arithmetic mean of compounds. With non-empty `weights` (same length) the
/// weighted mean is used instead.
DailyScore daily_score(std::span<const double> compounds, std::span<const double> weights = {});

/// Whitespace token count, the weight used by weight-by-length averaging.
double length_weight(std::string_view text);

enum class ProviderKind { lexicon, external_file };

/// Per-comment compound scores computed outside this process.
class ExternalScores {
public:
    ExternalScores() = default;
    explicit ExternalScores(std::unordered_map<std::string, double> scores) : scores_(std::move(scores)) {}

    double compound(const std::string& comment_id) const;  // throws InputError on unknown id
    bool contains(const std::string& comment_id) const { return scores_.count(comment_id) != 0; }
    std::size_t size() const { return scores_.size(); }

private:
    std::unordered_map<std::string, double> scores_;
};

/// CSV `comment_id,compound` with compound in [-1, 1]; duplicate ids are errors.
ExternalScores load_external_scores(const std::filesystem::path& path);
ExternalScores parse_external_scores(std::string_view text);

}  // namespace topicforge::sentiment
