#include "topicforge/eval/report.hpp"

#include <cstdio>
#include <functional>
#include <map>

#include <json.hpp>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/eval/plot.hpp"

namespace topicforge::eval {

namespace {

std::string model_title(nn::Arch a) {
    switch (a) {
        case nn::Arch::lstm: return "LSTM";
        case nn::Arch::cnn: return "CNN";
        case nn::Arch::cnn_lstm: return "CNN-LSTM";
        case nn::Arch::gan: return "GAN";
    }
    return "?";
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

struct MetricDef {
    const char* title;
    double Metrics::*field;
    bool higher_is_better;
};

constexpr MetricDef metric_defs[] = {{"RMSE", &Metrics::rmse, false},
                                     {"MAE", &Metrics::mae, false},
                                     {"R2 Score", &Metrics::r2, true},
                                     {"MAPE", &Metrics::mape, false}};

}  // namespace

std::string column_title(nn::Arch model, nn::Variant variant, const std::string& engine) {
    const std::string tool = engine == "lexicon" ? "Vader" : "External";
    switch (variant) {
        case nn::Variant::baseline: return model_title(model);
        case nn::Variant::sentiment: return model_title(model) + "(" + tool + ")";
        case nn::Variant::topic_sentiment: return model_title(model) + "(" + tool + "&TOPIC)";
    }
    return "?";
}

std::string report_csv(const ExperimentReport& report) {
    if (report.rows.empty()) throw InputError("report is empty");
    std::string out = "model,variant,engine,split,rmse,mae,r2,mape\n";
    for (const auto& r : report.rows)
        out += std::string(nn::arch_name(r.model)) + "," + std::string(nn::variant_name(r.variant)) + "," +
               csv::quote(r.engine) + "," + std::string(split_name(r.split)) + "," +
               csv::format_double(r.metrics.rmse) + "," + csv::format_double(r.metrics.mae) + "," +
               csv::format_double(r.metrics.r2) + "," + csv::format_double(r.metrics.mape) + "\n";
    return out;
}

std::string report_markdown(const ExperimentReport& report) {
    if (report.cells.empty()) throw InputError("report is empty");
    const auto& cells = report.cells;
    std::string out = "# Performance Evaluation Metrics\n\n";
    out += "Median over " + std::to_string(report.seeds.size()) + " seed(s); sentiment engine: " + report.engine +
           ".\n\n";
    out += "| TITLE |";
    for (const auto& c : cells) out += " " + column_title(c.model, c.variant, report.engine) + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < cells.size(); ++i) out += "---|";
    out += "\n";
    for (Split split : {Split::train, Split::test}) {
        out += split == Split::train ? "| Train Set |" : "| Test Set |";
        for (std::size_t i = 0; i < cells.size(); ++i) out += " |";
        out += "\n";
        for (const auto& def : metric_defs) {
            out += std::string("| ") + def.title + " |";
            for (std::size_t i = 0; i < cells.size(); ++i) {
                auto value = [&](std::size_t k) {
                    const Metrics& m = split == Split::train ? cells[k].median_train : cells[k].median_test;
                    return m.*def.field;
                };
                // Best within this model's group of variants; ties are all bold.
                bool best = true;
                std::size_t group = 0;
                for (std::size_t k = 0; k < cells.size(); ++k) {
                    if (cells[k].model != cells[i].model) continue;
                    ++group;
                    if (def.higher_is_better ? value(k) > value(i) : value(k) < value(i)) best = false;
                }
                const std::string text = fixed3(value(i));
                out += " " + (best && group > 1 ? "**" + text + "**" : text) + " |";
            }
            out += "\n";
        }
    }
    if (!report.config_snapshot.empty()) out += "\n## Configuration\n\n```ini\n" + report.config_snapshot + "```\n";
    return out;
}

std::string seeds_csv(const ExperimentReport& report) {
    std::string out = "model,variant,seed,split,rmse,mae,r2,mape\n";
    for (const auto& c : report.cells)
        for (const auto& run : c.runs)
            for (Split s : {Split::train, Split::test}) {
                const Metrics& m = s == Split::train ? run.train : run.test;
                out += std::string(nn::arch_name(c.model)) + "," + std::string(nn::variant_name(c.variant)) + "," +
                       std::to_string(run.seed) + "," + std::string(split_name(s)) + "," + csv::format_double(m.rmse) +
                       "," + csv::format_double(m.mae) + "," + csv::format_double(m.r2) + "," +
                       csv::format_double(m.mape) + "\n";
            }
    return out;
}

std::string predictions_csv(const Cell& cell) {
    std::string out = "date,split,actual,predicted\n";
    for (std::size_t i = 0; i < cell.train_dates.size(); ++i)
        out += cell.train_dates[i].str() + ",train," + csv::format_double(cell.train_actual[i]) + "," +
               csv::format_double(cell.train_pred[i]) + "\n";
    for (std::size_t i = 0; i < cell.test_dates.size(); ++i)
        out += cell.test_dates[i].str() + ",test," + csv::format_double(cell.test_actual[i]) + "," +
               csv::format_double(cell.test_pred[i]) + "\n";
    return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir, bool markdown, bool csv_table) {
    if (markdown) csv::write_file(dir / "report.md", report_markdown(report));
    if (csv_table) csv::write_file(dir / "report.csv", report_csv(report));
    csv::write_file(dir / "seeds.csv", seeds_csv(report));
    for (const auto& cell : report.cells) {
        const std::string key = cell.key();
        const std::string title = column_title(cell.model, cell.variant, report.engine);
        csv::write_file(dir / "predictions" / (key + ".csv"), predictions_csv(cell));
        auto days = [](const std::vector<Date>& d) {
            std::vector<double> x;
            for (const auto& v : d) x.push_back(static_cast<double>(v.days));
            return x;
        };
        for (Split s : {Split::train, Split::test}) {
            const auto& dates = s == Split::train ? cell.train_dates : cell.test_dates;
            const auto x = days(dates);
            std::vector<PlotSeries> series{
                {"actual", x, s == Split::train ? cell.train_actual : cell.test_actual},
                {"predicted", x, s == Split::train ? cell.train_pred : cell.test_pred}};
            PlotLabels labels{title + (s == Split::train ? " train" : " test"), "date", "adj close",
                              dates.front().str(), dates.back().str()};
            emit_plot(series, labels, dir / "plots" / (key + "_" + std::string(split_name(s)) + ".svg"));
        }
        std::vector<double> epochs;
        for (std::size_t e = 0; e < cell.loss_curve.size(); ++e) epochs.push_back(static_cast<double>(e + 1));
        if (!epochs.empty())
            emit_plot({{cell.model == nn::Arch::gan ? "V(D,G)" : "mse", epochs, cell.loss_curve}},
                      {title + " loss", "epoch", cell.model == nn::Arch::gan ? "value" : "loss", "", ""},
                      dir / "plots" / (key + "_loss.svg"));
        csv::write_file(dir / "predictions" / (key + "_loss.csv"), nn::loss_curve_csv(cell.loss_curve));
    }
}

void save_experiment(const ExperimentReport& report, const std::filesystem::path& dir) {
    nlohmann::ordered_json j;
    j["engine"] = report.engine;
    j["seeds"] = report.seeds;
    j["config"] = report.config_snapshot;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cells)
        j["cells"].push_back({{"model", nn::arch_name(c.model)},
                              {"variant", nn::variant_name(c.variant)},
                              {"dump_seed", c.dump_seed}});
    csv::write_file(dir / "experiment.json", j.dump(2) + "\n");
    csv::write_file(dir / "runs.csv", seeds_csv(report));
    for (const auto& c : report.cells) {
        csv::write_file(dir / "predictions" / (c.key() + ".csv"), predictions_csv(c));
        csv::write_file(dir / "predictions" / (c.key() + "_loss.csv"), nn::loss_curve_csv(c.loss_curve));
    }
}

namespace {

double number(const std::string& s, std::size_t line) {
    const auto v = csv::parse_double(s);
    if (!v) throw InputError("experiment file line " + std::to_string(line) + ": bad number '" + s + "'");
    return *v;
}

}  // namespace

ExperimentReport load_experiment(const std::filesystem::path& dir) {
    ExperimentReport report;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(csv::read_file(dir / "experiment.json"));
        report.engine = j.at("engine").get<std::string>();
        report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        report.config_snapshot = j.at("config").get<std::string>();
        for (const auto& c : j.at("cells")) {
            Cell cell;
            cell.model = nn::parse_arch(c.at("model").get<std::string>());
            cell.variant = nn::parse_variant(c.at("variant").get<std::string>());
            cell.dump_seed = c.at("dump_seed").get<std::uint64_t>();
            report.cells.push_back(std::move(cell));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("experiment.json: " + std::string(e.what()));
    }
    std::map<std::string, Cell*> by_key;
    for (auto& c : report.cells) by_key[c.key()] = &c;

    const auto runs = csv::read(dir / "runs.csv");
    if (runs.empty()) throw InputError("runs.csv is empty");
    std::map<std::pair<std::string, std::uint64_t>, SeedRun> seen;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const auto& f = runs[i].fields;
        if (f.size() != 8) throw InputError("runs.csv line " + std::to_string(runs[i].line) + ": expected 8 fields");
        const std::string key = f[0] + "_" + f[1];
        const auto seed = static_cast<std::uint64_t>(number(f[2], runs[i].line));
        Metrics m{number(f[4], runs[i].line), number(f[5], runs[i].line), number(f[6], runs[i].line),
                  number(f[7], runs[i].line)};
        SeedRun& run = seen[{key, seed}];
        run.seed = seed;
        (f[3] == "train" ? run.train : run.test) = m;
    }
    for (auto& c : report.cells)
        for (auto seed : report.seeds) {
            auto it = seen.find({c.key(), seed});
            if (it == seen.end())
                throw InputError("runs.csv has no entry for " + c.key() + " seed " + std::to_string(seed));
            c.runs.push_back(it->second);
        }

    for (auto& c : report.cells) {
        const auto rows = csv::read(dir / "predictions" / (c.key() + ".csv"));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& f = rows[i].fields;
            if (f.size() != 4) throw InputError("predictions line " + std::to_string(rows[i].line) + ": expected 4 fields");
            const auto d = Date::parse(f[0]);
            if (!d) throw InputError("predictions line " + std::to_string(rows[i].line) + ": bad date");
            const bool train = f[1] == "train";
            (train ? c.train_dates : c.test_dates).push_back(*d);
            (train ? c.train_actual : c.test_actual).push_back(number(f[2], rows[i].line));
            (train ? c.train_pred : c.test_pred).push_back(number(f[3], rows[i].line));
        }
        const auto loss = csv::read(dir / "predictions" / (c.key() + "_loss.csv"));
        for (std::size_t i = 1; i < loss.size(); ++i) c.loss_curve.push_back(number(loss[i].fields.at(1), loss[i].line));
    }
    summarize(report);
    return report;
}

}  // namespace topicforge::eval
