#pragma once

#include <span>

namespace topicforge::eval {

double rmse(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);
/// Throws NumericError when y has zero variance.
double r2(std::span<const double> y, std::span<const double> yhat);
/// Percent. Throws NumericError on a zero target.
double mape(std::span<const double> y, std::span<const double> yhat);

struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    double mape = 0.0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

Metrics compute_metrics(std::span<const double> y, std::span<const double> yhat);

}  // namespace topicforge::eval
