#include "topicforge/eval/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "topicforge/common/error.hpp"

namespace topicforge::eval {

std::string_view split_name(Split s) { return s == Split::train ? "train" : "test"; }

std::string Cell::key() const {
    return std::string(nn::arch_name(model)) + "_" + std::string(nn::variant_name(variant));
}

double median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::size_t worker_count(std::size_t requested) {
    if (requested) return requested;
    if (const char* env = std::getenv("TOPICFORGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Job {
    std::size_t cell = 0;
    std::size_t run = 0;
};

struct JobResult {
    SeedRun metrics;
    nn::TrainedForecaster trained;
};

Metrics aggregate(const std::vector<SeedRun>& runs, bool test) {
    std::vector<double> r, a, q, m;
    for (const auto& run : runs) {
        const Metrics& x = test ? run.test : run.train;
        r.push_back(x.rmse);
        a.push_back(x.mae);
        q.push_back(x.r2);
        m.push_back(x.mape);
    }
    return {median(r), median(a), median(q), median(m)};
}

}  // namespace

void summarize(ExperimentReport& report) {
    report.rows.clear();
    for (auto& cell : report.cells) {
        cell.median_train = aggregate(cell.runs, false);
        cell.median_test = aggregate(cell.runs, true);
        for (Split s : {Split::train, Split::test})
            report.rows.push_back({cell.model, cell.variant, report.engine, s,
                                   s == Split::train ? cell.median_train : cell.median_test});
    }
}

ExperimentReport run_experiment(const indicators::FeatureTable& frame, const ExperimentConfig& config) {
    if (config.models.empty() || config.variants.empty() || config.seeds.empty())
        throw InputError("experiment needs at least one model, variant and seed");
    for (auto v : config.variants)
        for (const auto& col : nn::variant_columns(v, config.topic_mode)) {
            bool present = false;
            for (const auto& c : frame.columns) present |= c.first == col;
            if (!present)
                throw InputError("variant " + std::string(nn::variant_name(v)) + " needs column '" + col + "'" +
                                 (col == "score_topic" ? " from the topics stage" : col == "score" ? " from the sentiment stage" : ""));
        }

    // Scalers and windows depend only on the variant.
    struct Prepared {
        nn::ScalerPair scalers;
        nn::WindowedDataset data;
        std::vector<double> train_actual, test_actual;
    };
    std::vector<Prepared> prepared;
    for (auto v : config.variants) {
        Prepared p;
        p.scalers = nn::fit_scalers(frame, nn::variant_columns(v, config.topic_mode));
        p.data = nn::window_dataset(frame, p.scalers, config.lookback);
        for (double y : p.data.y_train) p.train_actual.push_back(p.scalers.target.inverse(y));
        for (double y : p.data.y_test) p.test_actual.push_back(p.scalers.target.inverse(y));
        prepared.push_back(std::move(p));
    }
    // Targets are read back from the frame so metrics use exact prices.
    const auto& adj = frame.column("adj_close");
    const std::size_t rows = frame.rows();
    for (auto& p : prepared) {
        const std::size_t n_train = p.data.y_train.size();
        for (std::size_t i = 0; i < n_train; ++i) p.train_actual[i] = adj[config.lookback + i];
        for (std::size_t i = 0; i < nn::test_rows; ++i) p.test_actual[i] = adj[rows - nn::test_rows + i];
    }

    ExperimentReport report;
    report.seeds = config.seeds;
    report.engine = config.engine;
    std::vector<Job> jobs;
    for (auto m : config.models)
        for (std::size_t vi = 0; vi < config.variants.size(); ++vi) {
            Cell c;
            c.model = m;
            c.variant = config.variants[vi];
            c.runs.resize(config.seeds.size());
            for (std::size_t s = 0; s < config.seeds.size(); ++s) jobs.push_back({report.cells.size(), s});
            report.cells.push_back(std::move(c));
        }

    std::vector<JobResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
            try {
                const Cell& cell = report.cells[jobs[j].cell];
                const std::size_t vi = jobs[j].cell % config.variants.size();
                const Prepared& p = prepared[vi];
                nn::TrainOptions opts = config.train;
                opts.seed = config.seeds[jobs[j].run];
                auto trained = nn::train(cell.model, config.shape, p.data, p.scalers, opts);
                SeedRun run{opts.seed, compute_metrics(p.train_actual, trained.train_pred),
                            compute_metrics(p.test_actual, trained.test_pred)};
                results[j] = {run, std::move(trained)};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min(worker_count(config.threads), jobs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t j = 0; j < jobs.size(); ++j) {
        report.cells[jobs[j].cell].runs[jobs[j].run] = results[j].metrics;
        report.cells[jobs[j].cell].gan_clamp_events += results[j].trained.gan.clamp_events;
    }
    summarize(report);
    for (std::size_t ci = 0; ci < report.cells.size(); ++ci) {
        Cell& cell = report.cells[ci];
        std::size_t pick = 0;
        for (std::size_t s = 1; s < cell.runs.size(); ++s)
            if (std::abs(cell.runs[s].test.rmse - cell.median_test.rmse) <
                std::abs(cell.runs[pick].test.rmse - cell.median_test.rmse))
                pick = s;
        std::size_t job = 0;
        while (!(jobs[job].cell == ci && jobs[job].run == pick)) ++job;
        const Prepared& p = prepared[ci % config.variants.size()];
        const auto& trained = results[job].trained;
        cell.dump_seed = cell.runs[pick].seed;
        cell.train_dates = p.data.train_dates;
        cell.test_dates = p.data.test_dates;
        cell.train_actual = p.train_actual;
        cell.test_actual = p.test_actual;
        cell.train_pred = trained.train_pred;
        cell.test_pred = trained.test_pred;
        cell.loss_curve = trained.loss_curve;
        cell.model_state = trained.model;
        cell.scalers = trained.scalers;
    }
    return report;
}

}  // namespace topicforge::eval
