#include "topicforge/pipeline/manifest.hpp"

#include <chrono>
#include <ctime>

#include <json.hpp>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/common/hash.hpp"

namespace topicforge::pipeline {

namespace fs = std::filesystem;

std::string StageRecord::compute_chain() const {
    std::string text = "stage " + name + "\nconfig " + config_hash + "\n";
    for (const auto& [p, h] : inputs) text += "in " + p + " " + h + "\n";
    for (const auto& [s, h] : upstream) text += "up " + s + " " + h + "\n";
    for (const auto& [p, h] : outputs) text += "out " + p + " " + h + "\n";
    return hash::sha256_hex(text);
}

Manifest Manifest::load(const fs::path& path) {
    Manifest m;
    if (!fs::exists(path)) return m;
    try {
        const auto j = nlohmann::json::parse(csv::read_file(path));
        for (const auto& s : j.at("stages")) {
            StageRecord r;
            r.name = s.at("name").get<std::string>();
            r.config_hash = s.at("config_hash").get<std::string>();
            r.inputs = s.at("inputs").get<std::map<std::string, std::string>>();
            r.upstream = s.at("upstream").get<std::map<std::string, std::string>>();
            r.outputs = s.at("outputs").get<std::map<std::string, std::string>>();
            r.chain = s.at("chain").get<std::string>();
            r.completed_at = s.value("completed_at", "");
            m.stages_.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("corrupt manifest " + path.string() + ": " + e.what());
    }
    return m;
}

void Manifest::save(const fs::path& path) const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& r : stages_) {
        nlohmann::ordered_json s;
        s["name"] = r.name;
        s["config_hash"] = r.config_hash;
        s["inputs"] = r.inputs;
        s["upstream"] = r.upstream;
        s["outputs"] = r.outputs;
        s["chain"] = r.chain;
        s["completed_at"] = r.completed_at;
        j["stages"].push_back(std::move(s));
    }
    csv::write_file(path, j.dump(2) + "\n");
}

const StageRecord* Manifest::find(const std::string& stage) const {
    for (const auto& r : stages_)
        if (r.name == stage) return &r;
    return nullptr;
}

void Manifest::put(StageRecord record) {
    for (auto& r : stages_)
        if (r.name == record.name) {
            r = std::move(record);
            return;
        }
    stages_.push_back(std::move(record));
}

bool Manifest::verify_chain(std::string* problem) const {
    for (const auto& r : stages_) {
        if (r.compute_chain() != r.chain) {
            if (problem) *problem = "stage '" + r.name + "' chain hash does not re-derive";
            return false;
        }
        for (const auto& [up, h] : r.upstream) {
            const StageRecord* u = find(up);
            if (!u || u->chain != h) {
                if (problem) *problem = "stage '" + r.name + "' links to a stale or missing '" + up + "'";
                return false;
            }
        }
    }
    return true;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace topicforge::pipeline
