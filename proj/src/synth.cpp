#include "topicforge/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "topicforge/common/error.hpp"
#include "topicforge/common/rng.hpp"

namespace topicforge::synth {

namespace {

constexpr std::array<const char*, 12> earnings_words = {"earnings", "revenue", "guidance", "quarter",
                                                        "eps",      "margins", "outlook",  "sales",
                                                        "forecast", "dividend", "buyback", "report"};
constexpr std::array<const char*, 6> earnings_tone = {"strong", "growth", "profit", "excellent", "great", "win"};

constexpr std::array<const char*, 12> legal_words = {"lawsuit",   "probe",      "regulators", "investigation",
                                                     "court",     "subpoena",   "sec",        "settlement",
                                                     "charges",   "allegations", "attorneys", "filing"};
constexpr std::array<const char*, 6> legal_tone = {"fraud", "scandal", "penalty", "disaster", "worst", "crash"};

constexpr std::array<const char*, 12> chatter_words = {"chart",   "candle", "watching", "traders",
                                                       "today",   "thread", "morning",  "coffee",
                                                       "screen",  "wave",   "lunch",    "weekend"};
// Wide pools so that no single mood word gathers a dense neighbourhood of its own.
constexpr std::array<const char*, 20> chatter_up = {
    "admirable", "adore",    "amazing", "awesome", "beautiful", "best",     "brilliant", "delight",    "fabulous", "fantastic",
    "glorious",  "gorgeous", "joyful",  "love",    "lovely",    "magnificent", "marvelous", "perfect", "superb",   "wonderful"};
constexpr std::array<const char*, 20> chatter_down = {
    "abhorrent", "agonizing", "anguish",  "awful",   "betrayal", "brutal",  "catastrophic", "disgusting", "furious", "hateful",
    "horrible",  "miserable", "pathetic", "rotten",  "terrible", "tragic",  "hate",         "sad",        "angry",   "dreadful"};

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& words) {
    return words[rng.below(N)];
}

template <std::size_t N>
void add_distinct(Rng& rng, const std::array<const char*, N>& words, std::size_t count, std::vector<std::string>& out) {
    std::array<std::size_t, N> idx{};
    for (std::size_t i = 0; i < N; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count && i < N; ++i) {
        std::swap(idx[i], idx[i + rng.below(N - i)]);
        out.emplace_back(words[idx[i]]);
    }
}

std::string compose(Rng& rng, int group, const std::string& ticker) {
    std::vector<std::string> words;
    words.push_back("$" + ticker);
    switch (group) {
        case 0:
            add_distinct(rng, earnings_words, 4 + rng.below(2), words);
            words.emplace_back(pick(rng, earnings_tone));
            break;
        case 1:
            add_distinct(rng, legal_words, 4 + rng.below(2), words);
            words.emplace_back(pick(rng, legal_tone));
            break;
        default: {
            add_distinct(rng, chatter_words, 4 + rng.below(2), words);
            if (rng.below(2) == 0) add_distinct(rng, chatter_up, 2, words);
            else add_distinct(rng, chatter_down, 2, words);
        }
    }
    // Keep the ticker first and shuffle the rest.
    for (std::size_t i = words.size() - 1; i > 1; --i) std::swap(words[i], words[1 + rng.below(i)]);
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    return text;
}

}  // namespace

Corpus generate(const Options& opts) {
    if (opts.days < 2) throw InputError("synth: need at least 2 days");
    if (opts.comments_per_day <= 0.0) throw InputError("synth: comments_per_day must be positive");
    Rng rng(opts.seed);
    Corpus c;
    Date day = opts.start;
    double price = opts.anchor;
    std::size_t next_id = 0;
    for (std::size_t t = 0; t < opts.days; ++t) {
        while (day.weekday() >= 5) day = Date{day.days + 1};
        // Comments: between 1 and 2 * mean - 1 per day, uniform.
        const auto hi = static_cast<std::uint64_t>(std::max(1.0, std::round(2.0 * opts.comments_per_day - 1.0)));
        const std::size_t n = 1 + rng.below(hi);
        double sign_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double u = rng.uniform();
            const int group = u < 0.35 ? 0 : u < 0.70 ? 1 : 2;
            sign_sum += group == 0 ? 1.0 : group == 1 ? -1.0 : 0.0;
            ingest::CommentRecord r;
            r.id = std::to_string(next_id++);
            r.date = Timestamp{static_cast<std::int64_t>(day.days) * 86400 + 13 * 3600 +
                               static_cast<std::int64_t>(rng.below(6 * 3600))};
            r.text = compose(rng, group, opts.ticker);
            r.stock_name = opts.ticker;
            r.company_name = opts.company;
            c.comments.push_back(std::move(r));
            c.comment_group.push_back(group);
        }
        const double s = sign_sum / static_cast<double>(n);
        c.day_sign.push_back(s);

        ingest::Bar b;
        b.date = day;
        b.stock_name = opts.ticker;
        b.open = (c.bars.empty() ? price : c.bars.back().close) + rng.normal(0.0, 0.2 * opts.noise);
        b.close = price;
        b.adj_close = price;
        b.high = std::max(b.open, b.close) + std::abs(rng.normal(0.0, 0.3 * opts.noise));
        b.low = std::min(b.open, b.close) - std::abs(rng.normal(0.0, 0.3 * opts.noise));
        b.volume = 1'000'000 + static_cast<long long>(rng.below(500'000));
        c.bars.push_back(b);

        price = opts.anchor + opts.reversion * (price - opts.anchor) + opts.beta * s + rng.normal(0.0, opts.noise);
        if (price <= 0.0) throw NumericError("synth: price went non-positive; lower beta or noise");
        day = Date{day.days + 1};
    }
    return c;
}

std::string comments_csv(const Corpus& c) { return ingest::write_comments_csv(c.comments); }

std::string bars_csv(const Corpus& c) {
    ingest::BarSeries s;
    s.by_ticker[c.bars.empty() ? "" : c.bars.front().stock_name] = c.bars;
    return ingest::write_bars_csv(s);
}

}  // namespace topicforge::synth
