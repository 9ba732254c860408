// topicforge command line: one subcommand per pipeline stage plus `run`,
// `validate` and `synth`.
//
// Exit codes: 0 success, 1 validation error (config or stage dependency),
// 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/pipeline/config.hpp"
#include "topicforge/pipeline/stages.hpp"
#include "topicforge/synth.hpp"

namespace fs = std::filesystem;
using namespace topicforge;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_runtime = 2;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> ticker;
    std::optional<std::string> variant;
};

void add_pipeline_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "Run configuration file")->required();
    cmd->add_option("--seed", o.seed, "Train with this single seed instead of the configured list");
    cmd->add_option("--ticker", o.ticker, "Override [data] ticker");
    cmd->add_option("--variant", o.variant, "Restrict to one variant: baseline, sentiment or topic");
}

/// Returns the config or prints every problem and returns nothing.
std::optional<pipeline::RunConfig> load_config(const Overrides& o) {
    pipeline::Validation v;
    try {
        v = pipeline::validate_config(o.config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::nullopt;
    }
    for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
    if (!v.ok()) {
        for (const auto& e : v.errors) std::cerr << "error: " << e << "\n";
        return std::nullopt;
    }
    auto c = *v.config;
    if (o.seed) c.seeds = {*o.seed};
    if (o.ticker) c.ticker = *o.ticker;
    if (o.variant) {
        try {
            c.variants = {nn::parse_variant(*o.variant)};
        } catch (const InputError& e) {
            std::cerr << "error: --variant: " << e.what() << "\n";
            return std::nullopt;
        }
    }
    return c;
}

int run_stages(const Overrides& o, std::optional<pipeline::Stage> only) {
    auto config = load_config(o);
    if (!config) return exit_validation;
    try {
        pipeline::OutputLock lock(config->output);
        pipeline::Pipeline p(*config, std::cout);
        if (only) p.run(*only);
        else p.run_all();
        return exit_ok;
    } catch (const pipeline::DependencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topicforge: topic-aware sentiment features for stock price forecasting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "topicforge 0.1.0");

    Overrides o;
    std::optional<pipeline::Stage> stage;
    for (pipeline::Stage s : pipeline::all_stages) {
        auto* cmd = app.add_subcommand(std::string(pipeline::stage_name(s)), "Run the " +
                                                                                std::string(pipeline::stage_name(s)) +
                                                                                " stage");
        add_pipeline_options(cmd, o);
        cmd->callback([&stage, s] { stage = s; });
    }
    auto* run = app.add_subcommand("run", "Run every stage in order, skipping those that are up to date");
    add_pipeline_options(run, o);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a configuration file and list every problem");
    validate->add_option("--config", validate_path, "Run configuration file")->required();

    synth::Options so;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic comments/bars corpus with a known topic signal");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--days", so.days, "Trading days")->capture_default_str();
    synth_cmd->add_option("--comments-per-day", so.comments_per_day, "Mean comments per day")->capture_default_str();
    synth_cmd->add_option("--seed", so.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--beta", so.beta, "Price response to the topic signal")->capture_default_str();
    synth_cmd->add_option("--noise", so.noise, "Price noise standard deviation")->capture_default_str();
    synth_cmd->add_option("--ticker", so.ticker, "Ticker symbol")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_validation;
    }

    if (*validate) {
        try {
            auto v = pipeline::validate_config(validate_path);
            for (const auto& w : v.warnings) std::cout << "warning: " << w << "\n";
            for (const auto& e : v.errors) std::cout << "error: " << e << "\n";
            if (!v.ok()) return exit_validation;
            std::cout << "ok\n" << v.config->snapshot();
            return exit_ok;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_validation;
        }
    }
    if (*synth_cmd) {
        try {
            const auto corpus = synth::generate(so);
            csv::write_file(fs::path(synth_out) / "comments.csv", synth::comments_csv(corpus));
            csv::write_file(fs::path(synth_out) / "bars.csv", synth::bars_csv(corpus));
            std::cout << "wrote " << corpus.comments.size() << " comments and " << corpus.bars.size()
                      << " bars to " << synth_out << "\n";
            return exit_ok;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_runtime;
        }
    }
    if (*run) return run_stages(o, std::nullopt);
    return run_stages(o, stage);
}
