#include "topicforge/pipeline/frame.hpp"

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::pipeline {

std::string daily_csv(std::string_view column, const DailySeries& series) {
    std::string out = "date," + std::string(column) + "\n";
    for (const auto& [d, v] : series) out += d.str() + "," + csv::format_double(v) + "\n";
    return out;
}

DailySeries parse_daily_csv(std::string_view text, std::string_view column) {
    const auto records = csv::parse(text);
    if (records.empty()) throw InputError("daily series: empty file");
    csv::Header header(records[0]);
    const auto dc = header.require("date");
    const auto vc = header.require(column);
    DailySeries out;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i].fields;
        const auto v = csv::parse_double(f.at(vc));
        if (!v) throw InputError("daily series line " + std::to_string(records[i].line) + ": bad value");
        const auto d = Date::parse(f.at(dc));
        if (!d) throw InputError("daily series line " + std::to_string(records[i].line) + ": bad date");
        out[*d] = *v;
    }
    return out;
}

indicators::FeatureTable build_frame(const indicators::FeatureTable& features, const DailySeries& score,
                                     const std::optional<DailySeries>& score_topic) {
    indicators::FeatureTable frame = features;
    auto join = [&](const DailySeries& s) {
        indicators::Series col;
        for (const auto& d : frame.dates) {
            auto it = s.find(d);
            col.push_back(it == s.end() ? 0.0 : it->second);
        }
        return col;
    };
    frame.columns.emplace_back("score", join(score));
    if (score_topic) frame.columns.emplace_back("score_topic", join(*score_topic));
    return frame;
}

}  // namespace topicforge::pipeline
