#include "topicforge/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::sentiment {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = end + 1;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_split_char(unsigned char c) {
    if (std::isspace(c)) return true;
    return c < 0x80 && std::ispunct(c) && c != '\'' && c != '-';
}

struct Token {
    std::string_view raw;
    std::string lower;
    bool all_caps = false;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_split_char(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_split_char(static_cast<unsigned char>(text[j]))) ++j;
        std::string_view tok = text.substr(i, j - i);
        while (!tok.empty() && (tok.front() == '\'' || tok.front() == '-')) tok.remove_prefix(1);
        while (!tok.empty() && (tok.back() == '\'' || tok.back() == '-')) tok.remove_suffix(1);
        if (!tok.empty()) {
            bool has_alpha = false, has_lower = false;
            for (unsigned char c : tok) {
                has_alpha |= std::isalpha(c) != 0;
                has_lower |= std::islower(c) != 0;
            }
            out.push_back({tok, lower(tok), has_alpha && !has_lower});
        }
        i = j;
    }
    return out;
}

double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

bool is_negator(const Lexicon& lex, const std::string& word) {
    return lex.negators.count(word) != 0 || word.find("n't") != std::string::npos;
}

struct Scored {
    std::vector<double> per_token;
    double amplifier = 0.0;  // exclamation contribution, signed toward the sum
};

Scored score_tokens(std::string_view text, const Lexicon& lex, const RuleConfig& rules) {
    const auto tokens = tokenize(text);
    Scored s;
    s.per_token.assign(tokens.size(), 0.0);
    const auto caps = static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.all_caps; }));
    const bool cap_differential = caps > 0 && caps < tokens.size();

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        if (lex.boosters.count(tok.lower)) continue;  // intensifiers carry no valence of their own
        auto it = lex.entries.find(tok.lower);
        if (it == lex.entries.end()) continue;
        double v = it->second;
        if (v == 0.0) continue;
        const double dir = sign_of(v);
        if (tok.all_caps && cap_differential) v += dir * rules.caps_increment;
        for (int j = 1; j <= rules.booster_window && static_cast<std::size_t>(j) <= i; ++j) {
            auto b = lex.boosters.find(tokens[i - static_cast<std::size_t>(j)].lower);
            if (b != lex.boosters.end()) v += dir * b->second;
        }
        for (int j = 1; j <= rules.negation_window && static_cast<std::size_t>(j) <= i; ++j) {
            if (is_negator(lex, tokens[i - static_cast<std::size_t>(j)].lower)) {
                v *= rules.negation_scalar;
                break;
            }
        }
        s.per_token[i] = v;
    }

    double sum = 0.0;
    for (double v : s.per_token) sum += v;
    const int bangs = std::min<int>(rules.max_exclamations, static_cast<int>(std::count(text.begin(), text.end(), '!')));
    s.amplifier = sign_of(sum) * bangs * rules.exclamation_increment;
    return s;
}

}  // namespace

Lexicon load_lexicon(const std::filesystem::path& path) {
    const auto dir = path.parent_path();
    return load_lexicon(path, dir / "boosters.tsv", dir / "negators.txt");
}

Lexicon load_lexicon(const std::filesystem::path& lexicon, const std::filesystem::path& boosters,
                     const std::filesystem::path& negators) {
    Lexicon lex;
    const std::string text = csv::read_file(lexicon);
    std::size_t line_no = 0;
    for (auto line : lines_of(text)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos)
            throw InputError(lexicon.string() + ":" + std::to_string(line_no) + ": expected token<TAB>valence");
        std::string token(line.substr(0, tab));
        std::string_view rest = line.substr(tab + 1);
        rest = rest.substr(0, rest.find('\t'));
        auto v = csv::parse_double(rest);
        if (!v) throw InputError(lexicon.string() + ":" + std::to_string(line_no) + ": bad valence");
        if (*v < -4.0 || *v > 4.0)
            throw InputError(lexicon.string() + ":" + std::to_string(line_no) + ": valence " + csv::format_double(*v) +
                             " outside [-4, 4]");
        if (lex.entries.count(token))
            lex.warnings.push_back("duplicate lexicon token '" + token + "' on line " + std::to_string(line_no) +
                                   "; last value wins");
        lex.entries[token] = *v;
    }
    if (lex.entries.empty()) throw InputError("lexicon is empty: " + lexicon.string());

    line_no = 0;
    const std::string booster_text = csv::read_file(boosters);
    for (auto line : lines_of(booster_text)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        auto v = tab == std::string_view::npos ? std::nullopt : csv::parse_double(line.substr(tab + 1));
        if (!v) throw InputError(boosters.string() + ":" + std::to_string(line_no) + ": expected token<TAB>increment");
        lex.boosters[lower(line.substr(0, tab))] = *v;
    }
    const std::string negator_text = csv::read_file(negators);
    for (auto line : lines_of(negator_text))
        if (!line.empty()) lex.negators.insert(lower(line));
    if (lex.boosters.empty() || lex.negators.empty())
        throw InputError("booster and negator lists must be non-empty");
    return lex;
}

double normalize(double sum, double alpha) {
    const double c = sum / std::sqrt(sum * sum + alpha);
    return std::clamp(c, -1.0, 1.0);
}

double valence_sum(std::string_view text, const Lexicon& lexicon, const RuleConfig& rules) {
    auto s = score_tokens(text, lexicon, rules);
    double sum = s.amplifier;
    for (double v : s.per_token) sum += v;
    return sum;
}

SentimentScore score_comment(std::string_view text, const Lexicon& lexicon, const RuleConfig& rules) {
    auto s = score_tokens(text, lexicon, rules);
    if (s.per_token.empty()) return {};

    double sum = 0.0, pos_sum = 0.0, neg_sum = 0.0, neu = 0.0;
    for (double v : s.per_token) {
        sum += v;
        if (v > 0) pos_sum += v + 1.0;
        else if (v < 0) neg_sum += v - 1.0;
        else neu += 1.0;
    }
    if (pos_sum > std::fabs(neg_sum)) pos_sum += std::fabs(s.amplifier);
    else if (pos_sum < std::fabs(neg_sum)) neg_sum -= std::fabs(s.amplifier);
    sum += s.amplifier;

    SentimentScore out;
    const double total = pos_sum + std::fabs(neg_sum) + neu;
    out.pos = pos_sum / total;
    out.neg = std::fabs(neg_sum) / total;
    out.neu = neu / total;
    out.compound = normalize(sum, rules.normalization_alpha);
    return out;
}

Label classify(double compound, const RuleConfig& rules) {
    if (compound >= rules.positive_threshold) return Label::Positive;
    if (compound <= rules.negative_threshold) return Label::Negative;
    return Label::Neutral;
}

std::string_view label_name(Label l) {
    switch (l) {
        case Label::Positive: return "Positive";
        case Label::Negative: return "Negative";
        case Label::Neutral: break;
    }
    return "Neutral";
}

DailyScore daily_score(std::span<const double> compounds, std::span<const double> weights) {
    if (compounds.empty()) return {};
    if (!weights.empty() && weights.size() != compounds.size())
        throw InputError("daily_score: weights length does not match scores");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < compounds.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        num += w * compounds[i];
        den += w;
    }
    return {den > 0 ? num / den : 0.0, false};
}

double length_weight(std::string_view text) {
    double n = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) in_word = false;
        else if (!in_word) {
            in_word = true;
            n += 1;
        }
    }
    return std::max(1.0, n);
}

double ExternalScores::compound(const std::string& comment_id) const {
    auto it = scores_.find(comment_id);
    if (it == scores_.end()) throw InputError("no external sentiment score for comment id '" + comment_id + "'");
    return it->second;
}

ExternalScores load_external_scores(const std::filesystem::path& path) {
    return parse_external_scores(csv::read_file(path));
}

ExternalScores parse_external_scores(std::string_view text) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw InputError("external scores: missing header");
    csv::Header h(rows.front());
    const auto c_id = h.require("comment_id");
    const auto c_score = h.require("compound");
    std::unordered_map<std::string, double> scores;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        const std::string where = "external scores line " + std::to_string(rows[r].line);
        if (f.size() != h.size()) throw InputError(where + ": wrong field count");
        auto v = csv::parse_double(f[c_score]);
        if (!v || !std::isfinite(*v)) throw InputError(where + ": non-numeric compound '" + f[c_score] + "'");
        if (*v < -1.0 || *v > 1.0) throw InputError(where + ": compound " + f[c_score] + " outside [-1, 1]");
        if (!scores.emplace(f[c_id], *v).second) throw InputError(where + ": duplicate comment_id '" + f[c_id] + "'");
    }
    return ExternalScores(std::move(scores));
}

}  // namespace topicforge::sentiment
