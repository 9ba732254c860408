#include "topicforge/pipeline/config.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(',', start);
        if (end == std::string_view::npos) end = s.size();
        auto item = trim(s.substr(start, end - start));
        if (!item.empty()) out.push_back(std::move(item));
        start = end + 1;
    }
    return out;
}

std::optional<std::size_t> positive(const std::string& v, std::string& err, std::size_t min = 1) {
    auto n = csv::parse_int(v);
    if (!n || *n < static_cast<long long>(min)) {
        err = "expected an integer >= " + std::to_string(min) + ", got '" + v + "'";
        return std::nullopt;
    }
    return static_cast<std::size_t>(*n);
}

std::optional<bool> boolean(const std::string& v, std::string& err) {
    std::string l = v;
    for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
    if (l == "false" || l == "no" || l == "0" || l == "off") return false;
    err = "expected true or false, got '" + v + "'";
    return std::nullopt;
}

std::string path_text(const fs::path& p) { return p.generic_string(); }

template <typename T, typename F>
std::string join_names(const std::vector<T>& items, F name) {
    std::string out;
    for (const auto& i : items) out += (out.empty() ? "" : ",") + std::string(name(i));
    return out;
}

}  // namespace

IniFile parse_ini(std::string_view text) {
    IniFile ini;
    std::string section;
    std::size_t line_no = 0, start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string line = trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw InputError("config line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            ini.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw InputError("config line " + std::to_string(line_no) + ": empty key");
        ini.sections[section][key] = {value, line_no};
    }
    return ini;
}

bool RunConfig::needs_topics() const {
    return std::find(variants.begin(), variants.end(), nn::Variant::topic_sentiment) != variants.end();
}

eval::ExperimentConfig RunConfig::experiment() const {
    eval::ExperimentConfig e;
    e.models = models;
    e.variants = variants;
    e.seeds = seeds;
    e.lookback = lookback;
    e.train.epochs = epochs;
    e.train.lr = learning_rate;
    e.train.gan_lr = gan_learning_rate;
    e.train.gan_beta1 = gan_beta1;
    e.train.batch_size = batch_size;
    e.train.non_saturating = non_saturating;
    e.shape = shape;
    e.topic_mode = topic_mode;
    e.engine = engine;
    e.threads = threads;
    return e;
}

std::string RunConfig::snapshot() const {
    std::string s;
    auto kv = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    s += "[paths]\n";
    kv("comments", path_text(comments));
    kv("bars", path_text(bars));
    kv("lexicon", path_text(lexicon));
    if (embeddings) kv("embeddings", path_text(*embeddings));
    if (external_scores) kv("external_scores", path_text(*external_scores));
    kv("stop_words", path_text(stop_words));
    kv("output", path_text(output));
    s += "[data]\n";
    kv("ticker", ticker);
    s += "[sentiment]\n";
    kv("engine", engine);
    kv("weight_by_length", weight_by_length ? "true" : "false");
    s += "[topics]\n";
    kv("k", std::to_string(k));
    kv("out_dim", std::to_string(out_dim));
    kv("min_pts", std::to_string(min_pts));
    kv("min_cluster_size", std::to_string(min_cluster_size));
    kv("min_df", std::to_string(min_df));
    kv("epochs_umap", std::to_string(epochs_umap));
    kv("seed", std::to_string(topic_seed));
    kv("embedding_dim", std::to_string(embedding_dim));
    kv("top_words", std::to_string(top_words));
    s += "[forecast]\n";
    kv("lookback", std::to_string(lookback));
    kv("epochs", std::to_string(epochs));
    kv("seeds", join_names(seeds, [](std::uint64_t v) { return std::to_string(v); }));
    kv("models", join_names(models, nn::arch_name));
    kv("variants", join_names(variants, nn::variant_name));
    kv("topic_mode", topic_mode == nn::TopicMode::add ? "add" : "replace");
    kv("learning_rate", csv::format_double(learning_rate));
    kv("gan_learning_rate", csv::format_double(gan_learning_rate));
    kv("gan_beta1", csv::format_double(gan_beta1));
    kv("batch_size", std::to_string(batch_size));
    kv("non_saturating", non_saturating ? "true" : "false");
    kv("lstm_hidden", std::to_string(shape.lstm_hidden));
    kv("conv_filters", std::to_string(shape.conv_filters));
    kv("kernel", std::to_string(shape.kernel));
    kv("pool", std::to_string(shape.pool));
    kv("dense_units", std::to_string(shape.dense_units));
    kv("gan_hidden", std::to_string(shape.gan_hidden));
    kv("disc_units", std::to_string(shape.disc_units));
    kv("noise_dim", std::to_string(shape.noise_dim));
    s += "[report]\n";
    kv("format", format);
    return s;
}

Validation validate_config_text(std::string_view text, const fs::path& base_dir) {
    Validation out;
    IniFile ini;
    try {
        ini = parse_ini(text);
    } catch (const InputError& e) {
        out.errors.push_back(e.what());
        return out;
    }
    RunConfig c;
    c.lexicon = fs::path(TOPICFORGE_DATA_DIR) / "vader" / "lexicon.tsv";
    c.stop_words = fs::path(TOPICFORGE_DATA_DIR) / "stopwords_en.txt";

    using Setter = std::function<std::string(const std::string&)>;  // returns error text
    auto path_setter = [&](fs::path& target) {
        return [&, ptr = &target](const std::string& v) -> std::string {
            if (v.empty()) return "empty path";
            fs::path p(v);
            *ptr = (p.is_absolute() ? p : base_dir / p).lexically_normal();
            return {};
        };
    };
    auto opt_path_setter = [&](std::optional<fs::path>& target) {
        return [&, ptr = &target](const std::string& v) -> std::string {
            if (v.empty()) return {};
            fs::path p(v);
            *ptr = (p.is_absolute() ? p : base_dir / p).lexically_normal();
            return {};
        };
    };
    auto size_setter = [](std::size_t& target, std::size_t min) {
        return [ptr = &target, min](const std::string& v) -> std::string {
            std::string err;
            if (auto n = positive(v, err, min)) *ptr = *n;
            return err;
        };
    };
    auto bool_setter = [](bool& target) {
        return [ptr = &target](const std::string& v) -> std::string {
            std::string err;
            if (auto b = boolean(v, err)) *ptr = *b;
            return err;
        };
    };
    std::map<std::string, std::map<std::string, Setter>> known;
    known["paths"] = {
        {"comments", path_setter(c.comments)},
        {"bars", path_setter(c.bars)},
        {"lexicon", path_setter(c.lexicon)},
        {"embeddings", opt_path_setter(c.embeddings)},
        {"external_scores", opt_path_setter(c.external_scores)},
        {"stop_words", path_setter(c.stop_words)},
        {"output", path_setter(c.output)},
    };
    known["data"] = {{"ticker", [&](const std::string& v) -> std::string {
                          if (v.empty()) return "empty ticker";
                          c.ticker = v;
                          return {};
                      }}};
    known["sentiment"] = {
        {"engine",
         [&](const std::string& v) -> std::string {
             if (v != "lexicon" && v != "external") return "expected lexicon or external, got '" + v + "'";
             c.engine = v;
             return {};
         }},
        {"weight_by_length", bool_setter(c.weight_by_length)},
    };
    known["topics"] = {
        {"k", size_setter(c.k, 2)},
        {"out_dim", size_setter(c.out_dim, 1)},
        {"min_pts", size_setter(c.min_pts, 1)},
        {"min_cluster_size", size_setter(c.min_cluster_size, 2)},
        {"min_df", size_setter(c.min_df, 1)},
        {"epochs_umap", size_setter(c.epochs_umap, 1)},
        {"seed",
         [&](const std::string& v) -> std::string {
             auto n = csv::parse_int(v);
             if (!n || *n < 0) return "expected a non-negative integer, got '" + v + "'";
             c.topic_seed = static_cast<std::uint64_t>(*n);
             return {};
         }},
        {"embedding_dim", size_setter(c.embedding_dim, 2)},
        {"top_words", size_setter(c.top_words, 1)},
    };
    known["forecast"] = {
        {"lookback", size_setter(c.lookback, 1)},
        {"epochs", size_setter(c.epochs, 1)},
        {"seeds",
         [&](const std::string& v) -> std::string {
             std::vector<std::uint64_t> seeds;
             for (const auto& item : split_list(v)) {
                 const auto dots = item.find("..");
                 if (dots != std::string::npos) {
                     auto a = csv::parse_int(item.substr(0, dots));
                     auto b = csv::parse_int(item.substr(dots + 2));
                     if (!a || !b || *a < 0 || *b < *a) return "bad seed range '" + item + "'";
                     for (long long s = *a; s <= *b; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
                     continue;
                 }
                 auto n = csv::parse_int(item);
                 if (!n || *n < 0) return "bad seed '" + item + "'";
                 seeds.push_back(static_cast<std::uint64_t>(*n));
             }
             if (seeds.empty()) return "seed list is empty";
             c.seeds = std::move(seeds);
             return {};
         }},
        {"models",
         [&](const std::string& v) -> std::string {
             std::vector<nn::Arch> models;
             for (const auto& item : split_list(v)) {
                 try {
                     models.push_back(nn::parse_arch(item));
                 } catch (const InputError& e) {
                     return e.what();
                 }
             }
             if (models.empty()) return "model list is empty";
             c.models = std::move(models);
             return {};
         }},
        {"variants",
         [&](const std::string& v) -> std::string {
             std::vector<nn::Variant> variants;
             for (const auto& item : split_list(v)) {
                 try {
                     variants.push_back(nn::parse_variant(item));
                 } catch (const InputError& e) {
                     return e.what();
                 }
             }
             if (variants.empty()) return "variant list is empty";
             c.variants = std::move(variants);
             return {};
         }},
        {"topic_mode",
         [&](const std::string& v) -> std::string {
             if (v == "replace") c.topic_mode = nn::TopicMode::replace;
             else if (v == "add") c.topic_mode = nn::TopicMode::add;
             else return "expected replace or add, got '" + v + "'";
             return {};
         }},
        {"learning_rate",
         [&](const std::string& v) -> std::string {
             auto d = csv::parse_double(v);
             if (!d || !(*d > 0.0)) return "expected a positive number, got '" + v + "'";
             c.learning_rate = *d;
             return {};
         }},
        {"gan_learning_rate",
         [&](const std::string& v) -> std::string {
             auto d = csv::parse_double(v);
             if (!d || !(*d > 0.0)) return "expected a positive number, got '" + v + "'";
             c.gan_learning_rate = *d;
             return {};
         }},
        {"gan_beta1",
         [&](const std::string& v) -> std::string {
             auto d = csv::parse_double(v);
             if (!d || !(*d >= 0.0 && *d < 1.0)) return "expected a number in [0, 1), got '" + v + "'";
             c.gan_beta1 = *d;
             return {};
         }},
        {"batch_size", size_setter(c.batch_size, 0)},
        {"non_saturating", bool_setter(c.non_saturating)},
        {"threads", size_setter(c.threads, 1)},
        {"lstm_hidden", size_setter(c.shape.lstm_hidden, 1)},
        {"conv_filters", size_setter(c.shape.conv_filters, 1)},
        {"kernel", size_setter(c.shape.kernel, 1)},
        {"pool", size_setter(c.shape.pool, 1)},
        {"dense_units", size_setter(c.shape.dense_units, 1)},
        {"gan_hidden", size_setter(c.shape.gan_hidden, 1)},
        {"disc_units", size_setter(c.shape.disc_units, 1)},
        {"noise_dim", size_setter(c.shape.noise_dim, 1)},
    };
    known["report"] = {{"format", [&](const std::string& v) -> std::string {
                            if (v != "markdown" && v != "csv" && v != "both")
                                return "expected markdown, csv or both, got '" + v + "'";
                            c.format = v;
                            return {};
                        }}};

    for (const auto& [section, entries] : ini.sections) {
        auto sec = known.find(section);
        for (const auto& [key, entry] : entries) {
            const std::string where = "[" + section + "] " + key + " (line " + std::to_string(entry.line) + ")";
            if (sec == known.end() || !sec->second.count(key)) {
                out.warnings.push_back("unknown key " + where + " ignored");
                continue;
            }
            if (auto err = sec->second.at(key)(entry.value); !err.empty()) out.errors.push_back(where + ": " + err);
        }
    }

    auto require_file = [&](const fs::path& p, const std::string& key) {
        if (p.empty()) out.errors.push_back("[paths] " + key + ": required");
        else if (!fs::is_regular_file(p)) out.errors.push_back("[paths] " + key + ": file not found: " + path_text(p));
    };
    require_file(c.comments, "comments");
    require_file(c.bars, "bars");
    require_file(c.lexicon, "lexicon");
    require_file(c.stop_words, "stop_words");
    if (c.embeddings) require_file(*c.embeddings, "embeddings");
    if (c.external_scores) require_file(*c.external_scores, "external_scores");
    if (c.engine == "external" && !c.external_scores)
        out.errors.push_back("[sentiment] engine: 'external' requires [paths] external_scores");
    if (c.output.empty()) out.errors.push_back("[paths] output: required");
    if (c.ticker.empty()) out.errors.push_back("[data] ticker: required");

    if (out.errors.empty()) out.config = std::move(c);
    return out;
}

Validation validate_config(const fs::path& path) {
    const std::string text = csv::read_file(path);
    auto v = validate_config_text(text, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    if (v.config) v.config->source = path;
    return v;
}

}  // namespace topicforge::pipeline
