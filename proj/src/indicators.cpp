#include "topicforge/indicators.hpp"

#include <algorithm>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::indicators {

Series moving_average(std::span<const double> series, std::size_t window) {
    if (window == 0) throw InputError("moving_average: window must be >= 1");
    if (window > series.size())
        throw InputError("moving_average: window " + std::to_string(window) + " exceeds series length " +
                         std::to_string(series.size()));
    Series out(series.size(), undefined);
    for (std::size_t i = window - 1; i < series.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = i + 1 - window; j <= i; ++j) sum += series[j];
        out[i] = sum / static_cast<double>(window);
    }
    return out;
}

Series ema(std::span<const double> series, std::size_t span) {
    if (span == 0) throw InputError("ema: span must be >= 1");
    if (series.empty()) throw InputError("ema: empty series");
    const double alpha = 2.0 / (static_cast<double>(span) + 1.0);
    Series out(series.size());
    out[0] = series[0];
    for (std::size_t i = 1; i < series.size(); ++i) out[i] = alpha * series[i] + (1.0 - alpha) * out[i - 1];
    return out;
}

Series macd(std::span<const double> series) {
    if (series.size() < macd_slow)
        throw InputError("macd: need at least " + std::to_string(macd_slow) + " points, got " +
                         std::to_string(series.size()));
    const Series fast = ema(series, macd_fast);
    const Series slow = ema(series, macd_slow);
    Series out(series.size(), undefined);
    for (std::size_t i = macd_slow - 1; i < series.size(); ++i) out[i] = fast[i] - slow[i];
    return out;
}

Series rolling_std(std::span<const double> series, std::size_t window) {
    if (window < 2) throw InputError("rolling_std: window must be >= 2");
    if (window > series.size())
        throw InputError("rolling_std: window " + std::to_string(window) + " exceeds series length " +
                         std::to_string(series.size()));
    Series out(series.size(), undefined);
    const double n = static_cast<double>(window);
    for (std::size_t i = window - 1; i < series.size(); ++i) {
        const std::size_t lo = i + 1 - window;
        double mean = 0.0;
        for (std::size_t j = lo; j <= i; ++j) mean += series[j];
        mean /= n;
        double ss = 0.0;
        for (std::size_t j = lo; j <= i; ++j) ss += (series[j] - mean) * (series[j] - mean);
        out[i] = std::sqrt(ss / n);
    }
    return out;
}

Bands bollinger(std::span<const double> ma20, std::span<const double> sd20, double k) {
    if (ma20.size() != sd20.size())
        throw InputError("bollinger: length mismatch (" + std::to_string(ma20.size()) + " vs " +
                         std::to_string(sd20.size()) + ")");
    Bands b{Series(ma20.size()), Series(ma20.size())};
    for (std::size_t i = 0; i < ma20.size(); ++i) {
        b.upper[i] = ma20[i] + k * sd20[i];
        b.lower[i] = ma20[i] - k * sd20[i];
    }
    return b;
}

Series log_momentum(std::span<const double> series, std::size_t lag) {
    if (lag == 0) throw InputError("log_momentum: lag must be >= 1");
    if (lag >= series.size())
        throw InputError("log_momentum: lag " + std::to_string(lag) + " needs more than " + std::to_string(lag) +
                         " points");
    Series out(series.size(), undefined);
    for (std::size_t i = lag; i < series.size(); ++i) {
        const double m = series[i] - series[i - lag];
        out[i] = std::copysign(std::log1p(std::fabs(m)), m);
        if (m == 0.0) out[i] = 0.0;
    }
    return out;
}

const Series& FeatureTable::column(std::string_view name) const {
    for (const auto& [n, s] : columns)
        if (n == name) return s;
    throw InputError("feature table has no column '" + std::string(name) + "'");
}

std::string FeatureTable::to_csv() const {
    std::string out = "date";
    for (const auto& [name, _] : columns) out += "," + name;
    out += "\n";
    for (std::size_t r = 0; r < dates.size(); ++r) {
        out += dates[r].str();
        for (const auto& [_, s] : columns) out += "," + csv::format_double(s[r]);
        out += "\n";
    }
    return out;
}

FeatureTable FeatureTable::from_csv(std::string_view text) {
    auto rows = csv::parse(text);
    if (rows.empty() || rows.front().fields.empty() || rows.front().fields[0] != "date")
        throw InputError("feature csv: expected a header starting with 'date'");
    FeatureTable t;
    const auto& header = rows.front().fields;
    for (std::size_t c = 1; c < header.size(); ++c) t.columns.push_back({header[c], {}});
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() != header.size())
            throw InputError("feature csv: line " + std::to_string(rows[r].line) + " has wrong field count");
        auto d = Date::parse(f[0]);
        if (!d) throw InputError("feature csv: bad date on line " + std::to_string(rows[r].line));
        t.dates.push_back(*d);
        for (std::size_t c = 1; c < f.size(); ++c) {
            auto v = csv::parse_double(f[c]);
            if (!v) throw InputError("feature csv: bad number on line " + std::to_string(rows[r].line));
            t.columns[c - 1].second.push_back(*v);
        }
    }
    return t;
}

FeatureTable build_features(std::span<const ingest::Bar> bars, const FeatureOptions& opts) {
    if (bars.size() < min_bars)
        throw InputError("build_features: need at least " + std::to_string(min_bars) + " bars, got " +
                         std::to_string(bars.size()));
    const std::size_t n = bars.size();
    Series open(n), high(n), low(n), close(n), adj(n), volume(n);
    for (std::size_t i = 0; i < n; ++i) {
        open[i] = bars[i].open;
        high[i] = bars[i].high;
        low[i] = bars[i].low;
        close[i] = bars[i].close;
        adj[i] = bars[i].adj_close;
        volume[i] = static_cast<double>(bars[i].volume);
    }
    Series ma7 = moving_average(close, 7);
    Series ma20 = moving_average(close, 20);
    Series macd_s = macd(close);
    Series sd20 = rolling_std(close, 20);
    Bands bands = bollinger(ma20, sd20, opts.band_k);
    Series ema_s = ema(close, opts.ema_span);
    Series lm = log_momentum(close, opts.momentum_lag);

    std::vector<std::pair<std::string, Series>> cols = {
        {"open", std::move(open)},     {"high", std::move(high)},
        {"low", std::move(low)},       {"close", std::move(close)},
        {"adj_close", std::move(adj)}, {"volume", std::move(volume)},
        {"ma7", std::move(ma7)},       {"ma20", std::move(ma20)},
        {"macd", std::move(macd_s)},   {"sd20", std::move(sd20)},
        {"upper_band", std::move(bands.upper)}, {"lower_band", std::move(bands.lower)},
        {"ema", std::move(ema_s)},     {"log_momentum", std::move(lm)}};

    std::size_t first = 0;
    for (const auto& [_, s] : cols) {
        std::size_t k = 0;
        while (k < s.size() && !defined(s[k])) ++k;
        first = std::max(first, k);
    }
    if (n - first < 21) throw InputError("build_features: too few rows remain after warm-up");

    FeatureTable t;
    t.warmup_dropped = first;
    for (std::size_t i = first; i < n; ++i) t.dates.push_back(bars[i].date);
    for (auto& [name, s] : cols) t.columns.push_back({name, Series(s.begin() + static_cast<std::ptrdiff_t>(first), s.end())});
    return t;
}

}  // namespace topicforge::indicators
