#include "topicforge/topics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::topics {

StopWords load_stop_words(const std::filesystem::path& path) {
    StopWords out;
    std::string text = csv::read_file(path);
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string w = text.substr(start, end - start);
        while (!w.empty() && std::isspace(static_cast<unsigned char>(w.back()))) w.pop_back();
        if (!w.empty() && w.front() != '#') {
            for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            out.insert(std::move(w));
        }
        start = end + 1;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) cur.push_back(static_cast<char>(std::tolower(c)));
        else flush();
    }
    flush();
    return out;
}

std::size_t Vocabulary::index_of(std::string_view term) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), term);
    if (it == tokens.end() || *it != term) throw InputError("unknown term '" + std::string(term) + "'");
    return static_cast<std::size_t>(it - tokens.begin());
}

Vocabulary build_vocabulary(std::span<const std::string> corpus, const StopWords& stop_words, std::size_t min_df) {
    if (corpus.empty()) throw InputError("build_vocabulary: empty corpus");
    std::vector<std::map<std::string, std::size_t>> docs(corpus.size());
    std::map<std::string, std::size_t> df;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        for (auto& tok : tokenize(corpus[d]))
            if (!stop_words.count(tok)) ++docs[d][tok];
        for (const auto& [t, _] : docs[d]) ++df[t];
    }
    Vocabulary v;
    v.min_df = min_df;
    for (const auto& [t, count] : df)
        if (count >= min_df) v.tokens.push_back(t);
    if (v.tokens.empty()) throw InputError("build_vocabulary: vocabulary is empty after filtering");
    v.doc_term_counts.resize(corpus.size());
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        for (const auto& [t, count] : docs[d]) {
            auto it = std::lower_bound(v.tokens.begin(), v.tokens.end(), t);
            if (it != v.tokens.end() && *it == t)
                v.doc_term_counts[d].push_back({static_cast<std::size_t>(it - v.tokens.begin()), count});
        }
    }
    return v;
}

std::vector<int> topic_ids(std::span<const int> labels) {
    std::set<int> s;
    for (int l : labels)
        if (l >= 0) s.insert(l);
    return {s.begin(), s.end()};
}

std::size_t class_tf(const Vocabulary& vocab, std::span<const int> labels, std::size_t term, int topic) {
    if (term >= vocab.size()) throw InputError("class_tf: unknown term index");
    if (topic < 0) throw InputError("class_tf: the outlier topic has no term frequencies");
    if (labels.size() != vocab.doc_term_counts.size()) throw InputError("class_tf: label count does not match corpus");
    bool known = false;
    std::size_t tf = 0;
    for (std::size_t d = 0; d < labels.size(); ++d) {
        if (labels[d] != topic) continue;
        known = true;
        for (const auto& [t, c] : vocab.doc_term_counts[d])
            if (t == term) tf += c;
    }
    if (!known) throw InputError("class_tf: unknown topic " + std::to_string(topic));
    return tf;
}

std::size_t class_df(const Vocabulary& vocab, std::span<const int> labels, std::size_t term) {
    std::set<int> classes;
    for (std::size_t d = 0; d < labels.size(); ++d) {
        if (labels[d] < 0) continue;
        for (const auto& [t, c] : vocab.doc_term_counts[d])
            if (t == term && c > 0) classes.insert(labels[d]);
    }
    return classes.size();
}

double icf(const Vocabulary& vocab, std::span<const int> labels, std::size_t term) {
    const auto n = topic_ids(labels).size();
    if (n == 0) throw InputError("icf: no non-outlier topics");
    return std::log(static_cast<double>(n) / (1.0 + static_cast<double>(class_df(vocab, labels, term))));
}

std::size_t CtfidfMatrix::row_of(int topic) const {
    auto it = std::lower_bound(topics.begin(), topics.end(), topic);
    if (it == topics.end() || *it != topic) throw InputError("unknown topic " + std::to_string(topic));
    return static_cast<std::size_t>(it - topics.begin());
}

CtfidfMatrix ctfidf(const Vocabulary& vocab, std::span<const int> labels) {
    if (labels.size() != vocab.doc_term_counts.size()) throw InputError("ctfidf: label count does not match corpus");
    CtfidfMatrix m;
    m.topics = topic_ids(labels);
    if (m.topics.empty()) throw InputError("ctfidf: no non-outlier topics");
    m.n_terms = vocab.size();
    m.tf.assign(m.topics.size() * m.n_terms, 0);
    for (std::size_t d = 0; d < labels.size(); ++d) {
        if (labels[d] < 0) continue;
        const std::size_t row = m.row_of(labels[d]);
        for (const auto& [t, c] : vocab.doc_term_counts[d]) m.tf[row * m.n_terms + t] += c;
    }
    const double n_classes = static_cast<double>(m.topics.size());
    m.icf.resize(m.n_terms);
    for (std::size_t t = 0; t < m.n_terms; ++t) {
        std::size_t df = 0;
        for (std::size_t r = 0; r < m.topics.size(); ++r) df += m.tf[r * m.n_terms + t] > 0;
        m.icf[t] = std::log(n_classes / (1.0 + static_cast<double>(df)));
    }
    m.values.resize(m.tf.size());
    for (std::size_t r = 0; r < m.topics.size(); ++r)
        for (std::size_t t = 0; t < m.n_terms; ++t)
            m.values[r * m.n_terms + t] = static_cast<double>(m.tf[r * m.n_terms + t]) * m.icf[t];
    return m;
}

std::vector<std::pair<std::string, double>> top_words(const CtfidfMatrix& m, std::span<const std::string> terms,
                                                      int topic, std::size_t n) {
    const std::size_t row = m.row_of(topic);
    std::vector<std::size_t> order(m.n_terms);
    for (std::size_t t = 0; t < m.n_terms; ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (m.at(row, a) != m.at(row, b)) return m.at(row, a) > m.at(row, b);
        return terms[a] < terms[b];
    });
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back({terms[order[i]], m.at(row, order[i])});
    return out;
}

std::map<int, double> topic_sentiment(std::span<const int> labels, std::span<const double> doc_compounds) {
    if (labels.size() != doc_compounds.size()) throw InputError("topic_sentiment: need one score per document");
    std::map<int, std::pair<double, std::size_t>> acc;
    for (std::size_t d = 0; d < labels.size(); ++d) {
        if (labels[d] < 0) continue;
        auto& a = acc[labels[d]];
        a.first += doc_compounds[d];
        ++a.second;
    }
    std::map<int, double> out;
    for (const auto& [topic, a] : acc) out[topic] = a.first / static_cast<double>(a.second);
    return out;
}

TopicModel build_topic_model(const Vocabulary& vocab, std::vector<int> labels, std::span<const double> doc_compounds,
                             std::size_t n_top_words) {
    TopicModel model;
    model.labels = std::move(labels);
    model.terms = vocab.tokens;
    // Every document an outlier leaves an empty model; score_topic then
    // falls back to each comment's own compound.
    if (!topic_ids(model.labels).empty()) model.weights = ctfidf(vocab, model.labels);
    for (int t : model.weights.topics) model.top_words[t] = top_words(model.weights, model.terms, t, n_top_words);
    model.topic_sentiment = topic_sentiment(model.labels, doc_compounds);
    for (int l : model.labels) ++model.sizes[l];
    return model;
}

std::vector<DailyTopicScore> daily_topic_score(const ingest::AlignedCorpus& aligned, const TopicModel& model,
                                               std::span<const double> doc_compounds,
                                               const std::unordered_map<std::string, std::size_t>& doc_index) {
    std::vector<DailyTopicScore> out;
    for (const auto& day : aligned.days) {
        DailyTopicScore s{day.date, 0.0, day.comments.empty()};
        double sum = 0.0;
        for (const auto& c : day.comments) {
            auto it = doc_index.find(c.id);
            if (it == doc_index.end()) throw InputError("daily_topic_score: comment '" + c.id + "' not in topic model");
            const int label = model.labels[it->second];
            sum += label >= 0 ? model.topic_sentiment.at(label) : doc_compounds[it->second];
        }
        if (!day.comments.empty()) s.value = sum / static_cast<double>(day.comments.size());
        out.push_back(s);
    }
    return out;
}

std::string topic_report_csv(const TopicModel& model) {
    std::string out = "topic_id,size,sentiment,top_words\n";
    for (const auto& [topic, size] : model.sizes) {
        std::string words;
        std::string sentiment;
        if (topic >= 0) {
            for (const auto& [w, _] : model.top_words.at(topic)) words += (words.empty() ? "" : " ") + w;
            sentiment = csv::format_double(model.topic_sentiment.at(topic));
        }
        out += std::to_string(topic) + "," + std::to_string(size) + "," + sentiment + "," + csv::quote(words) + "\n";
    }
    return out;
}

std::string assignments_csv(const TopicModel& model, std::span<const std::string> doc_ids) {
    std::string out = "doc_id,topic\n";
    for (std::size_t i = 0; i < model.labels.size(); ++i)
        out += csv::quote(doc_ids[i]) + "," + std::to_string(model.labels[i]) + "\n";
    return out;
}

}  // namespace topicforge::topics
