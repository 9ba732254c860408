#include "topicforge/eval/metrics.hpp"

#include <cmath>
#include <string>

#include "topicforge/common/error.hpp"

namespace topicforge::eval {

namespace {

void check(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size())
        throw InputError("metric: length mismatch (" + std::to_string(y.size()) + " vs " +
                         std::to_string(yhat.size()) + ")");
    if (y.empty()) throw InputError("metric: empty input");
}

}  // namespace

double rmse(std::span<const double> y, std::span<const double> yhat) {
    check(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return std::sqrt(s / static_cast<double>(y.size()));
}

double mae(std::span<const double> y, std::span<const double> yhat) {
    check(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

double r2(std::span<const double> y, std::span<const double> yhat) {
    check(y, yhat);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) throw NumericError("r2: target has zero variance");
    return 1.0 - ss_res / ss_tot;
}

double mape(std::span<const double> y, std::span<const double> yhat) {
    check(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) throw NumericError("mape: zero target at index " + std::to_string(i));
        s += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
    }
    return 100.0 * s / static_cast<double>(y.size());
}

Metrics compute_metrics(std::span<const double> y, std::span<const double> yhat) {
    return {rmse(y, yhat), mae(y, yhat), r2(y, yhat), mape(y, yhat)};
}

}  // namespace topicforge::eval
