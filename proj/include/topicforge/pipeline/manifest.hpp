#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace topicforge::pipeline {

struct StageRecord {
    std::string name;
    std::string config_hash;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> upstream; // stage -> its chain hash
    std::map<std::string, std::string> outputs;  // path relative to the output dir -> sha256
    std::string chain;
    std::string completed_at;  // UTC, informational only

    /// sha256 over everything above except `chain` and `completed_at`.
    std::string compute_chain() const;
};

/// manifest.json in the output dir; stages listed in pipeline order.
class Manifest {
public:
    static Manifest load(const std::filesystem::path& path);  // empty when absent
    void save(const std::filesystem::path& path) const;

    const StageRecord* find(const std::string& stage) const;
    void put(StageRecord record);
    const std::vector<StageRecord>& stages() const { return stages_; }

    /// True when every recorded chain re-derives and every upstream link
    /// names the upstream's current chain.
    bool verify_chain(std::string* problem = nullptr) const;

private:
    std::vector<StageRecord> stages_;
};

std::string utc_now();

}  // namespace topicforge::pipeline
