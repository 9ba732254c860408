#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "topicforge/common/error.hpp"
#include "topicforge/pipeline/config.hpp"
#include "topicforge/pipeline/manifest.hpp"

namespace topicforge::pipeline {

enum class Stage { ingest, features, sentiment, topics, train, evaluate, report };

inline constexpr Stage all_stages[] = {Stage::ingest, Stage::features, Stage::sentiment, Stage::topics,
                                       Stage::train,  Stage::evaluate, Stage::report};

std::string_view stage_name(Stage s);

/// A stage was asked to run before the stage producing its inputs.
class DependencyError : public InputError {
public:
    DependencyError(std::string stage, std::string missing, const std::string& what)
        : InputError(what), stage_(std::move(stage)), missing_(std::move(missing)) {}
    const std::string& stage() const { return stage_; }
    const std::string& missing() const { return missing_; }

private:
    std::string stage_;
    std::string missing_;
};

/// Exclusive lock on an output dir, held for the object's lifetime.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir);  // throws Error when already held
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

struct StageResult {
    Stage stage = Stage::ingest;
    bool up_to_date = false;
    std::vector<std::string> outputs;  // relative to the output dir
};

class Pipeline {
public:
    Pipeline(RunConfig config, std::ostream& log);

    StageResult run(Stage s);
    std::vector<StageResult> run_all();

    const RunConfig& config() const { return config_; }
    std::filesystem::path manifest_path() const { return config_.output / "manifest.json"; }

private:
    struct Plan {
        std::vector<std::filesystem::path> external;  // absolute input files
        std::vector<std::pair<Stage, std::string>> upstream_files;  // producing stage, relative path
        std::string settings;
    };
    Plan plan(Stage s) const;
    void body(Stage s);

    void do_ingest();
    void do_features();
    void do_sentiment();
    void do_topics();
    void do_train();
    void do_evaluate();
    void do_report();

    std::filesystem::path at(std::string_view rel) const { return config_.output / rel; }

    RunConfig config_;
    std::ostream& log_;
};

}  // namespace topicforge::pipeline
