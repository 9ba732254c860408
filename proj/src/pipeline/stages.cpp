#include "topicforge/pipeline/stages.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <json.hpp>

#include "topicforge/clusterer.hpp"
#include "topicforge/common/csv.hpp"
#include "topicforge/common/hash.hpp"
#include "topicforge/embeddings.hpp"
#include "topicforge/eval/report.hpp"
#include "topicforge/indicators.hpp"
#include "topicforge/ingest.hpp"
#include "topicforge/nn/checkpoint.hpp"
#include "topicforge/pipeline/frame.hpp"
#include "topicforge/reducer.hpp"
#include "topicforge/sentiment.hpp"
#include "topicforge/topics.hpp"

namespace topicforge::pipeline {

namespace fs = std::filesystem;

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::features: return "features";
        case Stage::sentiment: return "sentiment";
        case Stage::topics: return "topics";
        case Stage::train: return "train";
        case Stage::evaluate: return "evaluate";
        case Stage::report: return "report";
    }
    return "?";
}

OutputLock::OutputLock(const fs::path& dir) : path_(dir / ".topicforge.lock") {
    fs::create_directories(dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw Error("output dir is locked by another command: " + path_.string() + " (remove it if no run is active)");
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

Pipeline::Pipeline(RunConfig config, std::ostream& log) : config_(std::move(config)), log_(log) {}

namespace {

std::string rel_string(const fs::path& p) { return p.generic_string(); }

std::vector<std::string> files_under(const fs::path& root, const fs::path& dir) {
    std::vector<std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out.push_back(rel_string(fs::relative(e.path(), root)));
    std::sort(out.begin(), out.end());
    return out;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

Pipeline::Plan Pipeline::plan(Stage s) const {
    Plan p;
    const RunConfig& c = config_;
    auto kv = [&](const std::string& k, const std::string& v) { p.settings += k + " = " + v + "\n"; };
    switch (s) {
        case Stage::ingest:
            p.external = {c.comments, c.bars};
            kv("ticker", c.ticker);
            break;
        case Stage::features:
            p.upstream_files = {{Stage::ingest, "ingest/bars.csv"}};
            kv("ticker", c.ticker);
            break;
        case Stage::sentiment:
            p.upstream_files = {{Stage::ingest, "ingest/comments.csv"}};
            if (c.engine == "lexicon") {
                const fs::path dir = c.lexicon.parent_path();
                p.external = {c.lexicon, dir / "boosters.tsv", dir / "negators.txt"};
            } else {
                p.external = {*c.external_scores};
            }
            kv("engine", c.engine);
            kv("weight_by_length", c.weight_by_length ? "true" : "false");
            break;
        case Stage::topics:
            p.upstream_files = {{Stage::ingest, "ingest/comments.csv"}, {Stage::sentiment, "sentiment/comments.csv"}};
            p.external = {c.stop_words};
            if (c.embeddings) p.external.push_back(*c.embeddings);
            for (const auto& [k, v] :
                 std::vector<std::pair<std::string, std::size_t>>{{"k", c.k},
                                                                  {"out_dim", c.out_dim},
                                                                  {"min_pts", c.min_pts},
                                                                  {"min_cluster_size", c.min_cluster_size},
                                                                  {"min_df", c.min_df},
                                                                  {"epochs_umap", c.epochs_umap},
                                                                  {"seed", c.topic_seed},
                                                                  {"embedding_dim", c.embedding_dim},
                                                                  {"top_words", c.top_words}})
                kv(k, std::to_string(v));
            kv("ticker", c.ticker);
            break;
        case Stage::train:
            p.upstream_files = {{Stage::features, "features/features.csv"}, {Stage::sentiment, "sentiment/daily.csv"}};
            if (c.needs_topics()) p.upstream_files.push_back({Stage::topics, "topics/daily.csv"});
            p.settings = c.snapshot();
            break;
        case Stage::evaluate:
            p.upstream_files = {{Stage::train, "train/experiment.json"}, {Stage::train, "train/runs.csv"},
                                {Stage::train, "train/frame.csv"}};
            break;
        case Stage::report:
            p.upstream_files = {{Stage::train, "train/experiment.json"}, {Stage::evaluate, "evaluate/metrics.csv"}};
            kv("format", c.format);
            break;
    }
    return p;
}

StageResult Pipeline::run(Stage s) {
    const std::string name(stage_name(s));
    Plan p = plan(s);
    Manifest manifest = Manifest::load(manifest_path());

    StageRecord rec;
    rec.name = name;
    rec.config_hash = hash::sha256_hex(p.settings);
    for (const auto& f : p.external) {
        if (!fs::is_regular_file(f)) throw InputError(name + ": input file not found: " + f.string());
        rec.inputs[rel_string(f)] = hash::sha256_file(f);
    }
    for (const auto& [up, rel] : p.upstream_files) {
        const std::string up_name(stage_name(up));
        const StageRecord* u = manifest.find(up_name);
        if (!u || !fs::is_regular_file(at(rel)))
            throw DependencyError(name, up_name,
                                  "stage '" + name + "' depends on '" + up_name + "' (missing " + rel +
                                      "); run `topicforge " + up_name + "` first");
        rec.inputs[rel] = hash::sha256_file(at(rel));
        rec.upstream[up_name] = u->chain;
    }

    if (const StageRecord* old = manifest.find(name);
        old && old->config_hash == rec.config_hash && old->inputs == rec.inputs && old->upstream == rec.upstream) {
        bool intact = true;
        for (const auto& [rel, h] : old->outputs)
            intact = intact && fs::is_regular_file(at(rel)) && hash::sha256_file(at(rel)) == h;
        if (intact) {
            log_ << name << ": up to date\n";
            StageResult r{s, true, {}};
            for (const auto& [rel, _] : old->outputs) r.outputs.push_back(rel);
            return r;
        }
    }

    fs::remove_all(at(name));
    fs::create_directories(at(name));
    body(s);
    StageResult result{s, false, files_under(config_.output, at(name))};
    for (const auto& rel : result.outputs) rec.outputs[rel] = hash::sha256_file(at(rel));
    rec.chain = rec.compute_chain();
    rec.completed_at = utc_now();
    manifest.put(std::move(rec));
    manifest.save(manifest_path());
    log_ << name << ": wrote " << result.outputs.size() << " file(s)\n";
    return result;
}

std::vector<StageResult> Pipeline::run_all() {
    std::vector<StageResult> out;
    for (Stage s : all_stages) {
        if (s == Stage::topics && !config_.needs_topics()) {
            log_ << "topics: skipped (no topic variant requested)\n";
            continue;
        }
        out.push_back(run(s));
    }
    return out;
}

void Pipeline::body(Stage s) {
    switch (s) {
        case Stage::ingest: return do_ingest();
        case Stage::features: return do_features();
        case Stage::sentiment: return do_sentiment();
        case Stage::topics: return do_topics();
        case Stage::train: return do_train();
        case Stage::evaluate: return do_evaluate();
        case Stage::report: return do_report();
    }
}

void Pipeline::do_ingest() {
    auto comments = ingest::parse_comments(config_.comments);
    auto bars = ingest::parse_bars(config_.bars);
    const auto aligned = ingest::align(comments.records, bars.series, config_.ticker);
    std::string company;
    for (const auto& r : comments.records)
        if (r.stock_name == config_.ticker) {
            company = r.company_name;
            break;
        }
    csv::write_file(at("ingest/comments.csv"), ingest::write_comments_csv(aligned.flatten(company)));
    ingest::BarSeries only;
    only.by_ticker[config_.ticker] = bars.series.ticker(config_.ticker);
    csv::write_file(at("ingest/bars.csv"), ingest::write_bars_csv(only));
    csv::write_file(at("ingest/comment_errors.csv"), ingest::write_errors_csv(comments.errors));
    csv::write_file(at("ingest/bar_errors.csv"), ingest::write_errors_csv(bars.errors));
    nlohmann::ordered_json j;
    j["ticker"] = config_.ticker;
    j["comment_rows"] = comments.data_rows;
    j["comment_errors"] = comments.errors.size();
    j["bar_errors"] = bars.errors.size();
    j["bars"] = only.by_ticker[config_.ticker].size();
    j["assigned"] = aligned.assigned;
    j["dropped_after_last_bar"] = aligned.dropped_after_last_bar;
    j["dropped_empty"] = aligned.dropped_empty;
    j["days_with_comments"] = aligned.days.size();
    csv::write_file(at("ingest/summary.json"), j.dump(2) + "\n");
    if (!comments.errors.empty() || !bars.errors.empty())
        log_ << "ingest: skipped " << comments.errors.size() << " comment row(s) and " << bars.errors.size()
             << " bar row(s); see ingest/*_errors.csv\n";
}

void Pipeline::do_features() {
    const auto bars = ingest::parse_bars(at("ingest/bars.csv"));
    const auto& series = bars.series.ticker(config_.ticker);
    const auto table = indicators::build_features(series);
    csv::write_file(at("features/features.csv"), table.to_csv());
}

namespace {

struct ScoredComment {
    std::string id;
    Date day;
    double compound = 0.0;
};

std::vector<ScoredComment> read_scores(const fs::path& path) {
    const auto rows = csv::read(path);
    if (rows.empty()) throw InputError("empty score file " + path.string());
    csv::Header h(rows[0]);
    const auto ic = h.require("id"), dc = h.require("date"), cc = h.require("compound");
    std::vector<ScoredComment> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        const auto d = Date::parse(f.at(dc));
        const auto v = csv::parse_double(f.at(cc));
        if (!d || !v) throw InputError(path.string() + " line " + std::to_string(rows[i].line) + ": bad row");
        out.push_back({f.at(ic), *d, *v});
    }
    return out;
}

}  // namespace

void Pipeline::do_sentiment() {
    const auto records = ingest::parse_comments(at("ingest/comments.csv")).records;
    std::string per_comment = "id,date,pos,neu,neg,compound,label\n";
    std::map<Date, std::pair<std::vector<double>, std::vector<double>>> by_day;
    auto emit = [&](const ingest::CommentRecord& r, const sentiment::SentimentScore& s, bool with_parts) {
        auto part = [&](double v) { return with_parts ? csv::format_double(v) : std::string(); };
        per_comment += csv::quote(r.id) + "," + r.date.date().str() + "," + part(s.pos) + "," + part(s.neu) + "," +
                       part(s.neg) + "," + csv::format_double(s.compound) + "," +
                       std::string(sentiment::label_name(sentiment::classify(s.compound))) + "\n";
        auto& day = by_day[r.date.date()];
        day.first.push_back(s.compound);
        day.second.push_back(sentiment::length_weight(r.text));
    };
    if (config_.engine == "lexicon") {
        const auto lex = sentiment::load_lexicon(config_.lexicon);
        if (!lex.warnings.empty()) log_ << "sentiment: " << lex.warnings.size() << " lexicon warning(s), first: " << lex.warnings.front() << "\n";
        for (const auto& r : records) emit(r, sentiment::score_comment(r.text, lex), true);
    } else {
        const auto ext = sentiment::load_external_scores(*config_.external_scores);
        for (const auto& r : records) {
            sentiment::SentimentScore s;
            s.compound = ext.compound(r.id);
            emit(r, s, false);
        }
    }
    DailySeries daily;
    for (const auto& [d, v] : by_day)
        daily[d] = sentiment::daily_score(v.first, config_.weight_by_length ? std::span<const double>(v.second)
                                                                             : std::span<const double>())
                       .value;
    csv::write_file(at("sentiment/comments.csv"), per_comment);
    csv::write_file(at("sentiment/daily.csv"), daily_csv("score", daily));
}

void Pipeline::do_topics() {
    const auto records = ingest::parse_comments(at("ingest/comments.csv")).records;
    const auto scores = read_scores(at("sentiment/comments.csv"));
    if (scores.size() != records.size()) throw InputError("topics: sentiment scores do not cover the corpus; rerun sentiment");
    std::vector<std::string> texts, ids;
    std::vector<double> compounds;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (scores[i].id != records[i].id) throw InputError("topics: sentiment scores are out of order; rerun sentiment");
        texts.push_back(records[i].text);
        ids.push_back(records[i].id);
        compounds.push_back(scores[i].compound);
        index[records[i].id] = i;
    }
    if (texts.size() <= config_.k)
        throw InputError("topics: need more than k=" + std::to_string(config_.k) + " comments, have " +
                         std::to_string(texts.size()));

    embeddings::EmbeddingMatrix emb;
    if (config_.embeddings) {
        emb = embeddings::load_embeddings(*config_.embeddings, std::span<const std::string>(ids));
        // Reorder rows to corpus order.
        std::unordered_map<std::string, std::size_t> row;
        for (std::size_t i = 0; i < emb.doc_ids.size(); ++i) row[emb.doc_ids[i]] = i;
        embeddings::EmbeddingMatrix ordered = emb;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto src = emb.row(row.at(ids[i]));
            std::copy(src.begin(), src.end(), ordered.values.begin() + static_cast<std::ptrdiff_t>(i * emb.dim));
            ordered.doc_ids[i] = ids[i];
        }
        emb = std::move(ordered);
    } else {
        emb = embeddings::fallback_embed(texts, ids, static_cast<std::uint32_t>(config_.embedding_dim),
                                         config_.topic_seed);
        embeddings::save(emb, at("topics/embeddings.emb"));
    }
    reducer::Points points{emb.n_docs, emb.dim, emb.to_f64()};
    reducer::ReduceOptions ro;
    ro.k = config_.k;
    ro.layout.out_dim = config_.out_dim;
    ro.layout.epochs = config_.epochs_umap;
    ro.layout.seed = config_.topic_seed;
    const auto layout = reducer::reduce(points, ro);
    const auto clusters = clusterer::cluster(layout.points(), {config_.min_pts, config_.min_cluster_size});

    auto stop = topics::load_stop_words(config_.stop_words);
    std::set<std::string> tickers;
    for (const auto& r : records) tickers.insert(lower(r.stock_name));
    tickers.insert(lower(config_.ticker));
    for (const auto& t : tickers)
        for (const auto& tok : topics::tokenize(t)) stop.insert(tok);
    const auto vocab = topics::build_vocabulary(texts, stop, config_.min_df);
    const auto model = topics::build_topic_model(vocab, clusters.labels.labels, compounds, config_.top_words);

    ingest::AlignedCorpus corpus;
    corpus.ticker = config_.ticker;
    for (const auto& r : records) {
        const Date d = r.date.date();
        if (corpus.days.empty() || corpus.days.back().date != d) corpus.days.push_back({d, {}});
        corpus.days.back().comments.push_back({r.id, r.date, r.text});
    }
    DailySeries daily;
    for (const auto& d : topics::daily_topic_score(corpus, model, compounds, index)) daily[d.date] = d.value;

    std::string ce = "epoch,cross_entropy\n";
    for (std::size_t e = 0; e < layout.epoch_ce.size(); ++e)
        ce += std::to_string(e + 1) + "," + csv::format_double(layout.epoch_ce[e]) + "\n";
    csv::write_file(at("topics/layout.csv"), reducer::layout_csv(layout, ids));
    csv::write_file(at("topics/layout_ce.csv"), ce);
    csv::write_file(at("topics/labels.csv"), clusterer::labels_csv(clusters.labels, ids));
    csv::write_file(at("topics/condensed_tree.csv"), clusters.tree.to_csv());
    csv::write_file(at("topics/topics.csv"), topics::topic_report_csv(model));
    csv::write_file(at("topics/assignments.csv"), topics::assignments_csv(model, ids));
    csv::write_file(at("topics/daily.csv"), daily_csv("score_topic", daily));
    log_ << "topics: " << clusters.labels.n_clusters << " topic(s), "
         << std::count(model.labels.begin(), model.labels.end(), -1) << " outlier comment(s)\n";
}

void Pipeline::do_train() {
    const auto features = indicators::FeatureTable::from_csv(csv::read_file(at("features/features.csv")));
    const auto score = parse_daily_csv(csv::read_file(at("sentiment/daily.csv")), "score");
    std::optional<DailySeries> topic;
    if (config_.needs_topics()) topic = parse_daily_csv(csv::read_file(at("topics/daily.csv")), "score_topic");
    const auto frame = build_frame(features, score, topic);
    csv::write_file(at("train/frame.csv"), frame.to_csv());

    auto report = eval::run_experiment(frame, config_.experiment());
    report.config_snapshot = config_.snapshot();
    eval::save_experiment(report, at("train"));
    for (const auto& cell : report.cells) {
        nn::save_checkpoint(at("train/checkpoints/" + cell.key() + ".tfc"), *cell.model_state, cell.scalers);
        if (cell.gan_clamp_events)
            log_ << "train: warning: " << cell.key() << " discriminator saturated " << cell.gan_clamp_events
                 << " time(s); outputs clamped to [1e-7, 1-1e-7]\n";
    }
}

void Pipeline::do_evaluate() {
    const auto report = eval::load_experiment(at("train"));
    const auto frame = indicators::FeatureTable::from_csv(csv::read_file(at("train/frame.csv")));
    std::string audit = "cell,dump_seed,scalers_train_only,max_abs_diff\n";
    for (const auto& cell : report.cells) {
        const auto ck = nn::load_checkpoint(at("train/checkpoints/" + cell.key() + ".tfc"));
        const auto refit = nn::fit_scalers(frame, ck.scalers.names);
        if (!(refit == ck.scalers))
            throw NumericError("evaluate: " + cell.key() + " scalers differ from a train-rows-only fit");
        const auto data = nn::window_dataset(frame, ck.scalers, ck.model.lookback);
        const auto train = nn::predict_unscaled(ck.model, data.x_train, ck.scalers);
        const auto test = nn::predict_unscaled(ck.model, data.x_test, ck.scalers);
        double diff = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) diff = std::max(diff, std::abs(train[i] - cell.train_pred.at(i)));
        for (std::size_t i = 0; i < test.size(); ++i) diff = std::max(diff, std::abs(test[i] - cell.test_pred.at(i)));
        if (!(diff <= 1e-9))
            throw NumericError("evaluate: checkpoint " + cell.key() + " does not reproduce its predictions (max diff " +
                               csv::format_double(diff) + ")");
        audit += cell.key() + "," + std::to_string(cell.dump_seed) + ",true," + csv::format_double(diff) + "\n";
    }
    csv::write_file(at("evaluate/metrics.csv"), eval::report_csv(report));
    csv::write_file(at("evaluate/audit.csv"), audit);
}

void Pipeline::do_report() {
    const auto report = eval::load_experiment(at("train"));
    eval::write_report(report, at("report"), config_.format != "csv", config_.format != "markdown");
}

}  // namespace topicforge::pipeline
