#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/topics.hpp"

using namespace topicforge;
using namespace topicforge::topics;

namespace {

struct Toy {
    std::vector<std::string> texts;
    std::vector<std::vector<std::string>> tokens;
    std::vector<int> labels;
};

/// Random corpus over terms "t0".."t{terms-1}" with labels in -1..classes-1.
Toy random_toy(Rng& rng, std::size_t classes, std::size_t terms, std::size_t docs) {
    Toy t;
    for (std::size_t d = 0; d < docs; ++d) {
        std::vector<std::string> words;
        std::string text;
        const std::size_t len = 1 + rng.below(8);
        for (std::size_t i = 0; i < len; ++i) {
            words.push_back("t" + std::to_string(rng.below(terms)));
            text += (i ? " " : "") + words.back();
        }
        t.texts.push_back(text);
        t.tokens.push_back(words);
        // Every class gets at least one doc; a few outliers follow.
        t.labels.push_back(d < classes ? static_cast<int>(d) : static_cast<int>(rng.below(classes + 1)) - 1);
    }
    return t;
}

}  // namespace

TEST_SUITE("topics") {

TEST_CASE("tokenize and vocabulary") {
    CHECK(tokenize("Buy $AMZN, now! a b2") == std::vector<std::string>{"buy", "amzn", "now", "b2"});
    const std::vector<std::string> corpus = {"Buy AMZN", "buy amzn"};
    const auto v = build_vocabulary(corpus, {});
    CHECK(v.tokens == std::vector<std::string>{"amzn", "buy"});
    std::vector<int> labels = {0, 0};
    CHECK(class_tf(v, labels, v.index_of("buy"), 0) == 2);
    CHECK(class_tf(v, labels, v.index_of("amzn"), 0) == 2);

    const StopWords stop = {"the", "and", "of"};
    CHECK_THROWS_AS(build_vocabulary(std::vector<std::string>{"the and", "of the"}, stop), InputError);
    const auto filtered = build_vocabulary(std::vector<std::string>{"apple pie", "apple tart"}, {}, 2);
    CHECK(filtered.tokens == std::vector<std::string>{"apple"});
    CHECK_THROWS_AS(filtered.index_of("pie"), InputError);
}

TEST_CASE("bundled stop words") {
    const auto stop = load_stop_words(std::filesystem::path(TOPICFORGE_DATA_DIR) / "stopwords_en.txt");
    CHECK(stop.count("the") == 1);
    const auto v = build_vocabulary(std::vector<std::string>{"the earnings of the quarter"}, stop);
    for (const auto& t : v.tokens) CHECK(stop.count(t) == 0);
}

TEST_CASE("class term frequency") {
    const std::vector<std::string> corpus = {"gain", "gain gain", "loss"};
    const auto v = build_vocabulary(corpus, {});
    const std::vector<int> labels = {0, 0, 1};
    CHECK(class_tf(v, labels, v.index_of("gain"), 0) == 3);
    CHECK(class_tf(v, labels, v.index_of("gain"), 1) == 0);

    Rng rng(20);
    for (int trial = 0; trial < 20; ++trial) {
        const auto toy = random_toy(rng, 4, 12, 25);
        const auto vocab = build_vocabulary(toy.texts, {});
        for (std::size_t term = 0; term < vocab.size(); ++term) {
            for (int c = 0; c < 4; ++c) {
                std::size_t expect = 0;
                for (std::size_t d = 0; d < toy.tokens.size(); ++d)
                    if (toy.labels[d] == c) expect += std::count(toy.tokens[d].begin(), toy.tokens[d].end(), vocab.tokens[term]);
                CHECK(class_tf(vocab, toy.labels, term, c) == expect);
            }
        }
    }
}

TEST_CASE("inverse class frequency values") {
    // Ten single-doc classes; "rare" sits in one of them, "common" in all.
    std::vector<std::string> corpus;
    std::vector<int> labels;
    for (int c = 0; c < 10; ++c) {
        corpus.push_back(c == 0 ? "rare common" : "common");
        labels.push_back(c);
    }
    const auto v = build_vocabulary(corpus, {});
    CHECK(icf(v, labels, v.index_of("rare")) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(icf(v, labels, v.index_of("common")) == doctest::Approx(std::log(10.0 / 11.0)).epsilon(1e-12));
    CHECK(icf(v, labels, v.index_of("common")) < 0);
    const std::vector<int> single = {0};
    const auto one = build_vocabulary(std::vector<std::string>{"solo"}, {});
    CHECK(icf(one, single, 0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("c-TF-IDF hand table") {
    // Three classes over five terms.
    const std::vector<std::string> corpus = {"alpha alpha beta", "alpha gamma", "beta delta", "delta delta epsilon",
                                             "gamma"};
    const std::vector<int> labels = {0, 0, 1, 1, 2};
    const auto v = build_vocabulary(corpus, {});
    const auto m = ctfidf(v, labels);
    const double l3_2 = std::log(3.0 / 2.0), l3_3 = std::log(1.0);
    struct Cell {
        int topic;
        const char* term;
        double value;
    };
    const Cell table[] = {
        {0, "alpha", 3 * l3_2}, {0, "beta", 1 * l3_3},  {0, "gamma", 1 * l3_3},  {0, "delta", 0}, {0, "epsilon", 0},
        {1, "alpha", 0},        {1, "beta", 1 * l3_3},  {1, "delta", 3 * l3_2},  {1, "gamma", 0}, {1, "epsilon", 1 * l3_2},
        {2, "alpha", 0},        {2, "beta", 0},         {2, "gamma", 1 * l3_3},  {2, "delta", 0}, {2, "epsilon", 0},
    };
    for (const auto& c : table) CHECK(m.at(m.row_of(c.topic), v.index_of(c.term)) == doctest::Approx(c.value).epsilon(1e-15));
    CHECK(3 * std::log(5.0) == doctest::Approx(4.8283).epsilon(1e-4));
}

TEST_CASE("c-TF-IDF equals the brute-force oracle and factorizes") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t classes = 1 + rng.below(5), terms = 2 + rng.below(29);
        const auto toy = random_toy(rng, classes, terms, 10 + rng.below(30));
        const auto vocab = build_vocabulary(toy.texts, {});
        const auto m = ctfidf(vocab, toy.labels);
        const auto expect = oracle::ctfidf(toy.tokens, toy.labels);
        CHECK(m.topics == topic_ids(toy.labels));
        for (std::size_t r = 0; r < m.topics.size(); ++r) {
            for (std::size_t t = 0; t < vocab.size(); ++t) {
                const auto it = expect.find({m.topics[r], vocab.tokens[t]});
                CHECK(m.at(r, t) == (it == expect.end() ? 0.0 : it->second));
                CHECK(m.at(r, t) == static_cast<double>(class_tf(vocab, toy.labels, t, m.topics[r])) * icf(vocab, toy.labels, t));
            }
        }
    }
}

TEST_CASE("distinctive term outranks a shared term of equal frequency") {
    const std::vector<std::string> corpus = {"earnings market", "lawsuit market", "chatter market"};
    const std::vector<int> labels = {0, 1, 2};
    const auto v = build_vocabulary(corpus, {});
    const auto m = ctfidf(v, labels);
    CHECK(m.at(m.row_of(0), v.index_of("earnings")) > m.at(m.row_of(0), v.index_of("market")));
    const auto top = top_words(m, v.tokens, 0, 1);
    REQUIRE(top.size() == 1);
    CHECK(top[0].first == "earnings");
}

TEST_CASE("top words ordering") {
    const std::vector<std::string> corpus = {"zeta beta alpha", "other", "more"};
    const std::vector<int> labels = {0, 1, 2};
    const auto v = build_vocabulary(corpus, {});
    const auto m = ctfidf(v, labels);
    const auto all = top_words(m, v.tokens, 0, 50);
    REQUIRE(all.size() == v.size());
    // alpha, beta, zeta tie; "more" and "other" are absent from topic 0.
    CHECK(all[0].first == "alpha");
    CHECK(all[1].first == "beta");
    CHECK(all[2].first == "zeta");
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].second >= all[i].second);
    CHECK_THROWS_AS(top_words(m, v.tokens, 7), InputError);
}

TEST_CASE("log base leaves rankings unchanged") {
    Rng rng(3);
    const auto toy = random_toy(rng, 3, 15, 30);
    const auto v = build_vocabulary(toy.texts, {});
    const auto m = ctfidf(v, toy.labels);
    for (std::size_t r = 0; r < m.topics.size(); ++r) {
        std::vector<std::size_t> by_ln(v.size()), by_log10(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) by_ln[i] = by_log10[i] = i;
        auto ln_w = [&](std::size_t t) { return m.at(r, t); };
        auto log10_w = [&](std::size_t t) { return m.at(r, t) / std::log(10.0); };
        std::stable_sort(by_ln.begin(), by_ln.end(), [&](auto a, auto b) { return ln_w(a) > ln_w(b); });
        std::stable_sort(by_log10.begin(), by_log10.end(), [&](auto a, auto b) { return log10_w(a) > log10_w(b); });
        CHECK(by_ln == by_log10);
    }
}

TEST_CASE("document order does not matter") {
    Rng rng(12);
    const auto toy = random_toy(rng, 3, 10, 20);
    auto texts = toy.texts;
    auto labels = toy.labels;
    std::reverse(texts.begin(), texts.end());
    std::reverse(labels.begin(), labels.end());
    const auto a = ctfidf(build_vocabulary(toy.texts, {}), toy.labels);
    const auto b = ctfidf(build_vocabulary(texts, {}), labels);
    CHECK(a.values == b.values);
}

TEST_CASE("topic sentiment is the member mean") {
    const std::vector<int> labels = {0, 0, 1, -1};
    const std::vector<double> scores = {0.2, 0.4, 0.0, 0.9};
    const auto s = topic_sentiment(labels, scores);
    CHECK(s.at(0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(s.at(1) == 0.0);
    CHECK(s.count(-1) == 0);

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> l(30);
        std::vector<double> c(30);
        for (std::size_t i = 0; i < l.size(); ++i) {
            l[i] = static_cast<int>(rng.below(5)) - 1;
            c[i] = rng.uniform(-1, 1);
        }
        const auto got = topic_sentiment(l, c);
        for (int topic = 0; topic < 4; ++topic) {
            double sum = 0;
            int n = 0;
            for (std::size_t i = 0; i < l.size(); ++i)
                if (l[i] == topic) sum += c[i], ++n;
            if (n == 0) CHECK(got.count(topic) == 0);
            else CHECK(got.at(topic) == doctest::Approx(sum / n).epsilon(1e-14));
        }
    }
}

TEST_CASE("daily topic score with outlier fallback") {
    ingest::AlignedCorpus aligned;
    aligned.ticker = "X";
    const Date d1 = Date::from_ymd(2021, 10, 4), d2 = Date::from_ymd(2021, 10, 5), d3 = Date::from_ymd(2021, 10, 6);
    aligned.days = {{d1, {{"a", {}, "x"}, {"b", {}, "x"}}}, {d2, {{"c", {}, "x"}, {"d", {}, "x"}}},
                    {d3, {{"a", {}, "x"}, {"c", {}, "x"}, {"e", {}, "x"}}}};
    const std::vector<std::string> corpus = {"up", "up", "noise", "noise", "down"};
    const std::vector<double> compounds = {0.2, 0.6, -0.3, 0.1, -0.8};
    const auto vocab = build_vocabulary(corpus, {});
    const auto model = build_topic_model(vocab, {0, 0, -1, -1, 1}, compounds);
    const std::unordered_map<std::string, std::size_t> index = {{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}, {"e", 4}};
    const auto daily = daily_topic_score(aligned, model, compounds, index);
    REQUIRE(daily.size() == 3);
    CHECK(daily[0].value == doctest::Approx(0.4).epsilon(1e-15));   // one topic, sentiment 0.4
    CHECK(daily[1].value == doctest::Approx(-0.1).epsilon(1e-15));  // outliers: mean of -0.3 and 0.1
    // Worked example: topic 0 (0.4), outlier c (-0.3), topic 1 (-0.8).
    CHECK(daily[2].value == doctest::Approx((0.4 - 0.3 - 0.8) / 3.0).epsilon(1e-15));
}

TEST_CASE("topic model reports") {
    const std::vector<std::string> corpus = {"up gain", "up gain", "down loss"};
    const auto model = build_topic_model(build_vocabulary(corpus, {}), {0, 0, 1}, std::vector<double>{0.5, 0.3, -0.5});
    CHECK(model.sizes.at(0) == 2);
    CHECK(model.weights.topics.size() == 2);
    const auto report = topic_report_csv(model);
    CHECK(report.rfind("topic_id,size,sentiment,top_words", 0) == 0);
    const std::vector<std::string> ids = {"a", "b", "c"};
    CHECK(assignments_csv(model, ids).find("c,1") != std::string::npos);
}

}
