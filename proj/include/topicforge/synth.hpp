#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "topicforge/ingest.hpp"

namespace topicforge::synth {

/// A corpus whose next-day price depends on the prior day's topic mix.
///
/// Each comment belongs to one of three topic groups with disjoint
/// vocabularies: earnings (sign +1), legal trouble (sign -1) and chatter
/// (sign 0, but loaded with random strong sentiment words). With s_t the mean
/// sign of day t's comments,
///   p_{t+1} = anchor + reversion * (p_t - anchor) + beta * s_t + noise.
struct Options {
    std::size_t days = 250;
    double comments_per_day = 2.0;
    std::uint64_t seed = 7;
    double anchor = 100.0;
    double reversion = 0.5;
    double beta = 3.0;
    double noise = 0.5;
    std::string ticker = "SYN";
    std::string company = "Synthetic Holdings";
    Date start = Date::from_ymd(2021, 1, 4);
};

struct Corpus {
    std::vector<ingest::CommentRecord> comments;
    std::vector<ingest::Bar> bars;
    std::vector<int> comment_group;  // 0 earnings, 1 legal, 2 chatter
    std::vector<double> day_sign;    // s_t per bar
};

Corpus generate(const Options& opts);

/// CSV text in the ingest formats.
std::string comments_csv(const Corpus& c);
std::string bars_csv(const Corpus& c);

}  // namespace topicforge::synth
