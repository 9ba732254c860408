#include "topicforge/nn/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "topicforge/common/error.hpp"

namespace topicforge::nn {

MinMax fit_min_max(std::span<const double> values, std::string_view column) {
    if (values.empty()) throw InputError("cannot fit scaler for '" + std::string(column) + "': no rows");
    MinMax m{values[0], values[0]};
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("cannot fit scaler for '" + std::string(column) + "': non-finite value");
        m.min = std::min(m.min, v);
        m.max = std::max(m.max, v);
    }
    if (!(m.max > m.min)) throw InputError("column '" + std::string(column) + "' is constant over the training rows");
    return m;
}

const MinMax& ScalerPair::feature(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return features[i];
    throw InputError("no scaler for column '" + std::string(name) + "'");
}

ScalerPair fit_scalers(const indicators::FeatureTable& frame, std::span<const std::string> columns,
                       std::size_t holdout) {
    if (frame.rows() <= holdout + 1)
        throw InputError("fit_scalers: need more than " + std::to_string(holdout + 1) + " rows, got " +
                         std::to_string(frame.rows()));
    const std::size_t train = frame.rows() - holdout;
    auto head = [&](std::string_view name) {
        const auto& c = frame.column(name);
        return std::span<const double>(c.data(), train);
    };
    ScalerPair s;
    s.target = fit_min_max(head("adj_close"), "adj_close");
    for (const auto& name : columns) {
        s.names.push_back(name);
        s.features.push_back(fit_min_max(head(name), name));
    }
    return s;
}

}  // namespace topicforge::nn
