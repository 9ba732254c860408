#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/eval/experiment.hpp"
#include "topicforge/eval/metrics.hpp"
#include "topicforge/eval/plot.hpp"
#include "topicforge/eval/report.hpp"
#include "topicforge/indicators.hpp"
#include "topicforge/synth.hpp"

using namespace topicforge;
using namespace topicforge::eval;

namespace {

/// Tag-balance check: every element closes in order and attributes are
/// quoted. Enough to catch broken markup from the plot writer.
bool well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while ((i = xml.find('<', i)) != std::string::npos) {
        const auto end = xml.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = xml.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.back() == '/';
        const std::string name = tag.substr(0, tag.find_first_of(" /"));
        if (!self_closing) stack.push_back(name);
    }
    return stack.empty();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

indicators::FeatureTable frame_with_scores(std::size_t days) {
    synth::Options o;
    o.days = days;
    auto table = indicators::build_features(synth::generate(o).bars);
    Rng rng(1);
    std::vector<double> score(table.rows()), topic(table.rows());
    for (auto& v : score) v = rng.uniform(-1, 1);
    for (auto& v : topic) v = rng.uniform(-1, 1);
    table.columns.emplace_back("score", score);
    table.columns.emplace_back("score_topic", topic);
    return table;
}

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.models = {nn::Arch::lstm};
    c.variants = {nn::Variant::baseline};
    c.seeds = {1};
    c.train.epochs = 5;
    c.shape.lstm_hidden = 4;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("metric examples") {
    const std::vector<double> y = {100, 200}, p = {110, 180};
    CHECK(rmse(y, p) == doctest::Approx(std::sqrt(250.0)).epsilon(1e-15));
    CHECK(mae(y, p) == 15.0);
    CHECK(mape(y, p) == doctest::Approx(10.0).epsilon(1e-15));
    const auto perfect = compute_metrics(y, y);
    CHECK(perfect.rmse == 0.0);
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.mape == 0.0);
    CHECK(perfect.r2 == 1.0);
    const std::vector<double> mean(2, 150.0);
    CHECK(r2(y, mean) == 0.0);
}

TEST_CASE("metric errors") {
    const std::vector<double> a = {1, 2}, b = {1}, zero = {0, 1}, flat = {3, 3};
    CHECK_THROWS_AS(rmse(a, b), InputError);
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), InputError);
    CHECK_THROWS_AS(mape(zero, a), NumericError);
    CHECK_THROWS_AS(r2(flat, a), NumericError);
}

TEST_CASE("metrics match direct formulas and respect the power-mean inequality") {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<double> y(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(10, 300);
            p[i] = y[i] + rng.normal(0, 5);
        }
        if (n < 2) y.push_back(20), p.push_back(25);
        CHECK(std::fabs(rmse(y, p) - oracle::rmse(y, p)) <= 1e-9);
        CHECK(std::fabs(mae(y, p) - oracle::mae(y, p)) <= 1e-9);
        CHECK(std::fabs(r2(y, p) - oracle::r2(y, p)) <= 1e-9);
        CHECK(std::fabs(mape(y, p) - oracle::mape(y, p)) <= 1e-9);
        CHECK(rmse(y, p) >= mae(y, p));
        CHECK(r2(y, p) <= 1.0);

        std::vector<double> ys(y), ps(p);
        for (auto& v : ys) v += 1000;
        for (auto& v : ps) v += 1000;
        CHECK(rmse(ys, ps) == doctest::Approx(rmse(y, p)).epsilon(1e-9));
        CHECK(mae(ys, ps) == doctest::Approx(mae(y, p)).epsilon(1e-9));
    }
}

TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK_THROWS_AS(median({}), InputError);
}

TEST_CASE("one model, one variant, one seed gives two rows") {
    const auto frame = frame_with_scores(90);
    const auto report = run_experiment(frame, tiny_config());
    REQUIRE(report.cells.size() == 1);
    CHECK(report.rows.size() == 2);
    CHECK(report.rows[0].split == Split::train);
    CHECK(report.rows[1].split == Split::test);
    for (const auto& row : report.rows) {
        CHECK(row.metrics.rmse >= row.metrics.mae);
        CHECK(row.metrics.mae >= 0.0);
        CHECK(row.metrics.mape >= 0.0);
    }
    const auto text = report_csv(report);
    CHECK(count(text, "\n") == 3);  // header plus two rows
}

TEST_CASE("same config and seeds give identical reports") {
    const auto frame = frame_with_scores(90);
    auto config = tiny_config();
    config.models = {nn::Arch::lstm, nn::Arch::cnn};
    config.variants = {nn::Variant::baseline, nn::Variant::topic_sentiment};
    config.seeds = {1, 2, 3};
    config.threads = 2;
    const auto a = run_experiment(frame, config);
    config.threads = 1;
    const auto b = run_experiment(frame, config);
    CHECK(report_csv(a) == report_csv(b));
    CHECK(seeds_csv(a) == seeds_csv(b));
    CHECK(report_markdown(a) == report_markdown(b));
    for (std::size_t c = 0; c < a.cells.size(); ++c) CHECK(predictions_csv(a.cells[c]) == predictions_csv(b.cells[c]));
}

TEST_CASE("median cell and dump seed") {
    const auto frame = frame_with_scores(90);
    auto config = tiny_config();
    config.seeds = {1, 2, 3};
    const auto report = run_experiment(frame, config);
    const auto& cell = report.cells[0];
    std::vector<double> test_rmse;
    for (const auto& r : cell.runs) test_rmse.push_back(r.test.rmse);
    CHECK(cell.median_test.rmse == median(test_rmse));
    const auto it = std::find_if(cell.runs.begin(), cell.runs.end(), [&](const SeedRun& r) { return r.seed == cell.dump_seed; });
    REQUIRE(it != cell.runs.end());
    CHECK(it->test.rmse == cell.median_test.rmse);
    CHECK(rmse(cell.test_actual, cell.test_pred) == doctest::Approx(it->test.rmse).epsilon(1e-12));
}

TEST_CASE("missing score column names the stage") {
    synth::Options o;
    o.days = 90;
    const auto frame = indicators::build_features(synth::generate(o).bars);
    auto config = tiny_config();
    config.variants = {nn::Variant::topic_sentiment};
    try {
        run_experiment(frame, config);
        FAIL("expected a missing-artifact error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("topics") != std::string::npos);
    }
}

TEST_CASE("markdown table layout and parse-back") {
    const auto frame = frame_with_scores(90);
    auto config = tiny_config();
    config.models = {nn::Arch::cnn, nn::Arch::lstm};
    config.variants = {nn::Variant::baseline, nn::Variant::topic_sentiment};
    const auto report = run_experiment(frame, config);
    const auto md = report_markdown(report);
    CHECK(md.find("| TITLE | CNN | CNN(Vader&TOPIC) | LSTM | LSTM(Vader&TOPIC) |") != std::string::npos);
    CHECK(column_title(nn::Arch::cnn_lstm, nn::Variant::sentiment, "lexicon") == "CNN-LSTM(Vader)");

    // Body rows parse as pipe-separated fields and agree with the CSV to 3 dp.
    std::istringstream lines(md);
    std::string line;
    std::vector<std::vector<std::string>> body;
    while (std::getline(lines, line)) {
        if (line.rfind("| RMSE", 0) != 0 && line.rfind("| MAE", 0) != 0 && line.rfind("| R2", 0) != 0 &&
            line.rfind("| MAPE", 0) != 0)
            continue;
        std::string stripped;
        for (char c : line.substr(1, line.size() - 2)) stripped += c == '|' ? ',' : c;
        std::erase(stripped, '*');
        std::erase(stripped, ' ');
        body.push_back(csv::parse(stripped + "\n")[0].fields);
    }
    REQUIRE(body.size() == 8);
    const auto& first_test = report.rows[1];  // cnn baseline test
    REQUIRE(first_test.split == Split::test);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", first_test.metrics.rmse);
    CHECK(body[4][1] == buf);
    for (const auto& row : body) CHECK(row.size() == 5);
}

TEST_CASE("bold marks the best value of each model group") {
    ExperimentReport r;
    r.seeds = {1};
    for (auto v : {nn::Variant::baseline, nn::Variant::topic_sentiment}) {
        Cell c;
        c.model = nn::Arch::lstm;
        c.variant = v;
        SeedRun run;
        run.seed = 1;
        run.train = {1.0, 0.5, 0.9, 1.0};
        run.test = v == nn::Variant::baseline ? Metrics{2.0, 1.0, 0.5, 2.0} : Metrics{1.5, 1.0, 0.7, 1.5};
        c.runs.push_back(run);
        r.cells.push_back(c);
    }
    summarize(r);
    const auto md = report_markdown(r);
    CHECK(md.find("| RMSE | 2.000 | **1.500** |") != std::string::npos);
    CHECK(md.find("| MAE | **1.000** | **1.000** |") != std::string::npos);
    CHECK(md.find("| R2 Score | 0.500 | **0.700** |") != std::string::npos);
    CHECK_THROWS_AS(report_markdown(ExperimentReport{}), InputError);
}

TEST_CASE("svg plots") {
    const std::vector<PlotSeries> two = {{"actual", {0, 1}, {5, 6}}};
    const auto svg = render_svg(two, {"t", "x", "y", "", ""});
    CHECK(count(svg, "<polyline") == 1);
    const auto p = svg.find("points=\"");
    const auto q = svg.find('"', p + 8);
    CHECK(count(svg.substr(p + 8, q - p - 8), ",") == 2);
    CHECK(well_formed(svg));

    std::vector<PlotSeries> both = {{"actual", {}, {}}, {"predicted <&>", {}, {}}};
    Rng rng(2);
    for (int i = 0; i < 300; ++i) {
        both[0].x.push_back(i);
        both[0].y.push_back(rng.uniform(90, 110));
        both[1].x.push_back(i);
        both[1].y.push_back(rng.uniform(90, 110));
    }
    const auto chart = render_svg(both, {"LSTM test", "date", "adj close", "2021-01-01", "2021-12-31"});
    CHECK(well_formed(chart));
    CHECK(chart.size() <= 200 * 1024);
    CHECK(chart.find(">actual</text>") != std::string::npos);
    CHECK(chart.find(">predicted &lt;&amp;&gt;</text>") != std::string::npos);
    CHECK_THROWS_AS(render_svg({}, {}), InputError);
}

TEST_CASE("experiment save and load round trip") {
    const auto frame = frame_with_scores(90);
    auto config = tiny_config();
    config.seeds = {1, 2};
    config.variants = {nn::Variant::baseline, nn::Variant::sentiment};
    const auto report = run_experiment(frame, config);
    const auto dir = fixtures::scratch_dir("experiment");
    save_experiment(report, dir);
    const auto back = load_experiment(dir);
    CHECK(report_csv(back) == report_csv(report));
    CHECK(seeds_csv(back) == seeds_csv(report));
    CHECK(report_markdown(back) == report_markdown(report));
    write_report(back, dir / "report");
    for (const char* f : {"report.md", "report.csv", "seeds.csv", "predictions/lstm_baseline.csv",
                          "plots/lstm_baseline_train.svg", "plots/lstm_baseline_test.svg", "plots/lstm_sentiment_loss.svg"})
        CHECK(std::filesystem::exists(dir / "report" / f));
    std::filesystem::remove_all(dir);
}

}
