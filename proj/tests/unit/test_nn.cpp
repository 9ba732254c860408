#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/indicators.hpp"
#include "topicforge/nn/checkpoint.hpp"
#include "topicforge/nn/dataset.hpp"
#include "topicforge/nn/gan.hpp"
#include "topicforge/nn/layers.hpp"
#include "topicforge/nn/models.hpp"
#include "topicforge/nn/scaling.hpp"
#include "topicforge/nn/train.hpp"
#include "topicforge/synth.hpp"

using namespace topicforge;
using namespace topicforge::nn;

namespace {

/// Indicator frame of a small synthetic corpus plus random score columns.
indicators::FeatureTable small_frame(std::size_t days = 90, std::uint64_t seed = 7) {
    synth::Options o;
    o.days = days;
    o.seed = seed;
    auto table = indicators::build_features(synth::generate(o).bars);
    Rng rng(seed);
    std::vector<double> score(table.rows()), topic(table.rows());
    for (auto& v : score) v = rng.uniform(-1, 1);
    for (auto& v : topic) v = rng.uniform(-1, 1);
    table.columns.emplace_back("score", score);
    table.columns.emplace_back("score_topic", topic);
    return table;
}

double lstm_gate(const ParamSet& p, const std::string& g, std::size_t u, const double* x, std::size_t in,
                 const std::vector<double>& h) {
    const auto& wx = p.info(p.find("t.W_" + g + "x"));
    const auto& wh = p.info(p.find("t.W_" + g + "h"));
    const auto& b = p.info(p.find("t.b_" + g));
    double v = p.values()[b.offset + u];
    for (std::size_t k = 0; k < in; ++k) v += p.values()[wx.offset + u * in + k] * x[k];
    for (std::size_t k = 0; k < h.size(); ++k) v += p.values()[wh.offset + u * h.size() + k] * h[k];
    return v;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("min-max scaling") {
    const std::vector<double> col = {0, 10};
    const auto s = fit_min_max(col, "x");
    CHECK(s.transform(5) == 0.5);
    CHECK(s.transform(0) == 0.0);
    CHECK(s.transform(10) == 1.0);
    Rng rng(1);
    std::vector<double> data(50);
    for (auto& v : data) v = rng.uniform(-300, 900);
    const auto r = fit_min_max(data, "r");
    for (double v : data) CHECK(std::fabs(r.inverse(r.transform(v)) - v) <= 1e-12 * std::max(1.0, std::fabs(v)));
    try {
        fit_min_max(std::vector<double>{3, 3, 3}, "volume");
        FAIL("expected constant-column error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("volume") != std::string::npos);
    }
    const MinMax target{100, 200};
    CHECK(target.inverse(0.5) == 150.0);
}

TEST_CASE("scalers ignore the held-out rows") {
    auto frame = small_frame();
    const auto cols = feature_columns(true, true);
    const auto before = fit_scalers(frame, cols);
    // Spike every held-out row; the train-only fit must not move.
    for (auto& [name, series] : frame.columns)
        for (std::size_t r = frame.rows() - test_rows; r < frame.rows(); ++r) series[r] += 1e6;
    CHECK(fit_scalers(frame, cols) == before);
    CHECK_FALSE(fit_scalers(frame, cols, 0) == before);
}

TEST_CASE("variant columns") {
    CHECK(variant_columns(Variant::baseline).size() == 14);
    CHECK(variant_columns(Variant::sentiment).back() == "score");
    CHECK(variant_columns(Variant::topic_sentiment, TopicMode::replace).back() == "score_topic");
    CHECK(variant_columns(Variant::topic_sentiment, TopicMode::replace).size() == 15);
    CHECK(variant_columns(Variant::topic_sentiment, TopicMode::add).size() == 16);
    CHECK(feature_columns(true, true).size() == 16);
    CHECK(parse_variant("topic") == Variant::topic_sentiment);
    CHECK_THROWS_AS(parse_variant("nope"), InputError);
}

TEST_CASE("windowing counts and indexing") {
    auto frame = small_frame();
    // Trim to 25 rows.
    frame.dates.resize(25);
    for (auto& [n, s] : frame.columns) s.resize(25);
    const auto scalers = fit_scalers(frame, feature_columns(true, false));
    const auto ds = window_dataset(frame, scalers, 1, true, false);
    CHECK(ds.x_train.n + ds.x_test.n == 24);
    CHECK(ds.x_test.n == 20);
    CHECK(ds.y_test.size() == 20);
    CHECK(ds.feature_names.size() == 15);

    const auto full = small_frame();
    const auto s16 = fit_scalers(full, feature_columns(true, true));
    const std::size_t lookback = 5;
    const auto d16 = window_dataset(full, s16, lookback, true, true);
    CHECK(d16.feature_names.size() == 16);
    CHECK(d16.x_train.n + d16.x_test.n == full.rows() - lookback);
    // Sample t covers rows [t - lookback + 1, t] and targets row t + 1.
    for (std::size_t i : {std::size_t{0}, std::size_t{7}, d16.x_train.n - 1}) {
        const std::size_t t = i + lookback - 1;
        for (std::size_t step = 0; step < lookback; ++step) {
            for (std::size_t f = 0; f < 16; ++f) {
                const auto& name = d16.feature_names[f];
                const double raw = full.column(name)[t - lookback + 1 + step];
                CHECK(d16.x_train.at(i, step, f) == s16.feature(name).transform(raw));
            }
        }
        CHECK(d16.y_train[i] == s16.target.transform(full.column("adj_close")[t + 1]));
        CHECK(d16.train_dates[i] == full.dates[t + 1]);
    }
    CHECK(d16.test_dates.back() == full.dates.back());
    frame.dates.resize(20);
    for (auto& [n, s] : frame.columns) s.resize(20);
    CHECK_THROWS_AS(window_dataset(frame, scalers, 1, true, false), InputError);
}

TEST_CASE("lstm with zero parameters stays at zero") {
    ParamSet p;
    const auto cell = Lstm::create(p, "t", 3, 4);
    p.fill(0.0);
    const std::vector<double> seq = {1, 2, 3, -1, 0.5, 2, 4, 4, 4};
    LstmCache c;
    cell.forward(p, seq.data(), 3, c);
    for (std::size_t k = 0; k < 12; ++k) {
        CHECK(c.f[k] == 0.5);
        CHECK(c.i[k] == 0.5);
        CHECK(c.o[k] == 0.5);
        CHECK(c.c[k] == 0.0);
        CHECK(c.h[k] == 0.0);
    }
}

TEST_CASE("forced gates give the cell-state identities") {
    ParamSet p;
    const auto cell = Lstm::create(p, "t", 2, 3);
    Rng rng(9);
    p.init_uniform(rng);
    std::vector<double> seq(2 * 12);
    for (auto& v : seq) v = rng.uniform(-1, 1);
    LstmCache keep;
    cell.forward(p, seq.data(), 12, keep, {1.0, 0.0});
    for (double v : keep.c) CHECK(v == 0.0);

    // f = 1, i = 1: C accumulates the candidates, C_t = C_{t-1} + g_t.
    LstmCache acc;
    cell.forward(p, seq.data(), 12, acc, {1.0, 1.0});
    for (std::size_t t = 1; t < 12; ++t)
        for (std::size_t u = 0; u < 3; ++u) CHECK(acc.c[t * 3 + u] == doctest::Approx(acc.c[(t - 1) * 3 + u] + acc.g[t * 3 + u]).epsilon(1e-15));
}

TEST_CASE("lstm matches a scalar-loop oracle and keeps gates in range") {
    ParamSet p;
    const std::size_t in = 3, hidden = 4, steps = 3;
    const auto cell = Lstm::create(p, "t", in, hidden);
    Rng rng(31);
    p.init_uniform(rng);
    for (auto& v : p.values()) v *= 3.0;  // push gates away from 0.5
    std::vector<double> seq(in * steps);
    for (auto& v : seq) v = rng.uniform(-2, 2);
    LstmCache c;
    cell.forward(p, seq.data(), steps, c);

    std::vector<double> h(hidden, 0.0), state(hidden, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        const double* x = seq.data() + t * in;
        std::vector<double> nh(hidden), ns(hidden);
        for (std::size_t u = 0; u < hidden; ++u) {
            const double f = 1.0 / (1.0 + std::exp(-lstm_gate(p, "f", u, x, in, h)));
            const double g = std::tanh(lstm_gate(p, "c", u, x, in, h));
            const double i = 1.0 / (1.0 + std::exp(-lstm_gate(p, "i", u, x, in, h)));
            const double o = 1.0 / (1.0 + std::exp(-lstm_gate(p, "o", u, x, in, h)));
            ns[u] = f * state[u] + i * g;
            nh[u] = o * std::tanh(ns[u]);
            const std::size_t k = t * hidden + u;
            CHECK(std::fabs(c.f[k] - f) < 1e-12);
            CHECK(std::fabs(c.g[k] - g) < 1e-12);
            CHECK(std::fabs(c.c[k] - ns[u]) < 1e-12);
            CHECK(std::fabs(c.h[k] - nh[u]) < 1e-12);
            CHECK(c.f[k] > 0.0);
            CHECK(c.f[k] < 1.0);
            CHECK(c.i[k] > 0.0);
            CHECK(c.i[k] < 1.0);
            CHECK(c.o[k] > 0.0);
            CHECK(c.o[k] < 1.0);
            CHECK(std::fabs(c.g[k]) < 1.0);
        }
        h = nh;
        state = ns;
    }
}

TEST_CASE("conv1d examples") {
    ParamSet p;
    auto id = Conv1d::create(p, "id", 1, 1, 1);
    p.view("id.w")[0] = 1.0;
    p.view("id.b")[0] = 0.0;
    const std::vector<double> x = {3, 5, 9};
    std::vector<double> z(3), a(3);
    id.forward(p, x.data(), 3, z.data(), a.data());
    CHECK(a == x);

    ParamSet q;
    auto diff = Conv1d::create(q, "d", 1, 1, 2);
    q.view("d.w")[0] = 1.0;
    q.view("d.w")[1] = -1.0;
    q.view("d.b")[0] = 0.0;
    std::vector<double> z2(2), a2(2);
    diff.forward(q, x.data(), 3, z2.data(), a2.data());
    CHECK(z2 == std::vector<double>{-2, -4});
    CHECK(a2 == std::vector<double>{0, 0});
    CHECK_THROWS_AS(diff.out_steps(1), InputError);

    // Random case against a direct loop.
    ParamSet r;
    const std::size_t ch = 3, filters = 4, kernel = 2, steps = 6;
    auto conv = Conv1d::create(r, "r", ch, filters, kernel);
    Rng rng(2);
    r.init_uniform(rng);
    std::vector<double> in(steps * ch);
    for (auto& v : in) v = rng.uniform(-1, 1);
    std::vector<double> zz((steps - 1) * filters), aa(zz.size());
    conv.forward(r, in.data(), steps, zz.data(), aa.data());
    const auto w = r.view("r.w");
    const auto b = r.view("r.b");
    for (std::size_t j = 0; j + kernel <= steps; ++j)
        for (std::size_t f = 0; f < filters; ++f) {
            double s = b[f];
            for (std::size_t k = 0; k < kernel; ++k)
                for (std::size_t c = 0; c < ch; ++c) s += w[f * kernel * ch + k * ch + c] * in[(j + k) * ch + c];
            CHECK(std::fabs(zz[j * filters + f] - s) < 1e-14);
            CHECK(std::fabs(aa[j * filters + f] - std::max(s, 0.0)) < 1e-14);
        }
}

TEST_CASE("maxpool examples") {
    CHECK(maxpool({1, 3, 2, 5}) == std::vector<double>{3, 5});
    CHECK(maxpool({4, 4, 4, 4, 4}) == std::vector<double>{4, 4});
    CHECK(maxpool({7}).empty());
    CHECK(maxpool_steps(5, 2) == 2);
}

TEST_CASE("dense-only path with zero weights outputs its bias") {
    StackSpec spec;
    spec.steps = 3;
    spec.features = 2;
    spec.dense = {{1, Activation::identity}};
    Stack net(spec);
    net.params().fill(0.0);
    net.params().view("dense0.b")[0] = 0.7;
    Windows x{5, 3, 2, std::vector<double>(30)};
    Rng rng(4);
    for (auto& v : x.data) v = rng.uniform();
    for (double v : net.predict(x)) CHECK(v == 0.7);
}

TEST_CASE("batch of one equals the single-sample forward") {
    for (Arch a : {Arch::lstm, Arch::cnn, Arch::cnn_lstm}) {
        auto m = gradcheck::small_model(a, 5);
        const auto b = gradcheck::small_batch(6, 0);
        const auto batch = m.predict(b.x);
        for (std::size_t i = 0; i < b.x.n; ++i) {
            Windows one{1, b.x.steps, b.x.features,
                        std::vector<double>(b.x.sample(i), b.x.sample(i) + b.x.stride())};
            StackCache cache;
            CHECK(m.predict(one)[0] == batch[i]);
            CHECK(m.net.forward(b.x.sample(i), nullptr, cache) == batch[i]);
        }
    }
}

TEST_CASE("architectures have the declared layers") {
    const ModelShape shape;
    const auto lstm = Model::create(Arch::lstm, shape, 5, 15);
    CHECK(lstm.net.params().info(lstm.net.params().find("lstm.W_fx")).rows == 50);
    CHECK(lstm.net.params().info(lstm.net.params().find("lstm.W_fx")).fan_in == 65);
    const auto cnn = Model::create(Arch::cnn, shape, 5, 15);
    CHECK(cnn.net.params().info(cnn.net.params().find("conv.w")).rows == 64);
    CHECK(cnn.net.params().info(cnn.net.params().find("dense0.W")).rows == 50);
    const auto gan = Model::create(Arch::gan, shape, 5, 15);
    CHECK(gan.net.params().info(gan.net.params().find("lstm.W_fx")).rows == 32);
    CHECK(gan.disc.params().info(gan.disc.params().find("dense0.W")).cols == 5 * 15 + 1);
    CHECK_THROWS_AS(parse_arch("transformer"), InputError);
}

TEST_CASE("fixed-seed forward regression pin") {
    const auto b = gradcheck::small_batch(77, 0);
    const double golden[3][4] = {
#include "golden_forward.inc"
    };
    int row = 0;
    for (Arch a : {Arch::lstm, Arch::cnn, Arch::cnn_lstm}) {
        const auto out = gradcheck::small_model(a, 77).predict(b.x);
        for (std::size_t i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(golden[row][i]).epsilon(1e-13));
        ++row;
    }
}

TEST_CASE("mse equals the mean of independent squared errors") {
    auto m = gradcheck::small_model(Arch::cnn_lstm, 8);
    const auto b = gradcheck::small_batch(9, 0);
    const auto pred = m.predict(b.x);
    double expect = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) expect += (pred[i] - b.y[i]) * (pred[i] - b.y[i]);
    expect /= static_cast<double>(pred.size());
    CHECK(std::fabs(mse_loss(m.net, b.x, b.y, {}) - expect) < 1e-12);
}

TEST_CASE("perfect weights give zero loss and zero gradient") {
    StackSpec spec;
    spec.steps = 3;
    spec.features = 3;
    spec.dense = {{1, Activation::identity}};
    Stack net(spec);
    net.params().fill(0.0);
    net.params().view("dense0.b")[0] = 0.25;
    const auto b = gradcheck::small_batch(3, 0);
    const std::vector<double> y(b.x.n, 0.25);
    std::vector<double> grad(net.params().size(), 0.0);
    CHECK(mse_loss(net, b.x, y, grad) == 0.0);
    for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("analytic gradients match finite differences") {
    for (const auto& r : gradcheck::all()) {
        INFO(r.what << " worst " << r.worst << " at " << r.worst_param);
        CHECK(r.checked > 0);
        CHECK(r.failed == 0);
    }
}

TEST_CASE("training lowers the loss and is deterministic") {
    const auto frame = small_frame(120);
    const auto cols = variant_columns(Variant::sentiment);
    const auto scalers = fit_scalers(frame, cols);
    const auto data = window_dataset(frame, scalers, 5, true, false);
    TrainOptions opts;
    opts.epochs = 40;
    opts.seed = 3;
    ModelShape shape;
    shape.lstm_hidden = 8;
    shape.conv_filters = 8;
    shape.dense_units = 8;
    for (Arch a : {Arch::lstm, Arch::cnn, Arch::cnn_lstm}) {
        const auto t1 = train(a, shape, data, scalers, opts);
        REQUIRE(t1.loss_curve.size() == 40);
        for (double l : t1.loss_curve) CHECK(std::isfinite(l));
        CHECK(t1.loss_curve.back() < t1.loss_curve.front());
        CHECK(t1.train_pred.size() == data.y_train.size());
        CHECK(t1.test_pred.size() == 20);
        const auto t2 = train(a, shape, data, scalers, opts);
        CHECK(std::equal(t1.model.net.params().values().begin(), t1.model.net.params().values().end(),
                         t2.model.net.params().values().begin()));
        CHECK(t1.test_pred == t2.test_pred);

        // Two-step manual path equals predict_unscaled.
        const auto scaled = t1.model.predict(data.x_test);
        for (std::size_t i = 0; i < scaled.size(); ++i) CHECK(t1.test_pred[i] == scalers.target.inverse(scaled[i]));
    }
}

TEST_CASE("constant scaled output maps back through the target scaler") {
    auto m = Model::create(Arch::cnn, gradcheck::small_shape(), 3, 3);
    m.net.params().fill(0.0);
    const auto& last = m.net.params().tensors().back();
    m.net.params().values()[last.offset] = 0.5;
    ScalerPair s;
    s.target = {100, 200};
    const auto b = gradcheck::small_batch(1, 0);
    for (double v : predict_unscaled(m, b.x, s)) CHECK(v == 150.0);
}

TEST_CASE("gan value and clamp") {
    const std::vector<double> half(8, 0.5);
    CHECK(gan_value(half, half) == doctest::Approx(2 * std::log(0.5)).epsilon(1e-15));
    CHECK(gan_value(half, half) == doctest::Approx(-1.386).epsilon(1e-3));
    const std::vector<double> zero(4, 0.0), one(4, 1.0);
    CHECK(std::isfinite(gan_value(zero, one)));
    std::size_t count = 0;
    CHECK(clamp_probability(0.0, &count) == gan_clamp);
    CHECK(clamp_probability(1.0, &count) == 1.0 - gan_clamp);
    CHECK(clamp_probability(0.3, &count) == 0.3);
    CHECK(count == 2);
}

TEST_CASE("gan discriminator does not collapse") {
    const auto frame = small_frame(120);
    const auto cols = variant_columns(Variant::baseline);
    const auto scalers = fit_scalers(frame, cols);
    const auto data = window_dataset(frame, scalers, 5, false, false);
    TrainOptions opts;
    opts.epochs = 200;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        opts.seed = seed;
        const auto t = gan_train(ModelShape{}, data, scalers, opts);
        REQUIRE(t.gan.d_accuracy.size() == 200);
        for (std::size_t e = 10; e < t.gan.d_accuracy.size(); ++e) {
            INFO("seed " << seed << " epoch " << e + 1);
            CHECK(t.gan.d_accuracy[e] > 0.2);
            CHECK(t.gan.d_accuracy[e] < 0.98);
        }
        for (double v : t.test_pred) CHECK(std::isfinite(v));
    }
}

TEST_CASE("checkpoint round trip") {
    const auto frame = small_frame();
    const auto scalers = fit_scalers(frame, variant_columns(Variant::baseline));
    for (Arch a : {Arch::lstm, Arch::cnn, Arch::cnn_lstm, Arch::gan}) {
        const auto m = gradcheck::small_model(a, 12);
        const auto bytes = encode_checkpoint(m, scalers);
        CHECK(bytes.substr(0, 4) == "TFC1");
        const auto back = decode_checkpoint(bytes);
        CHECK(back.model.arch == a);
        CHECK(back.model.shape == m.shape);
        CHECK(back.scalers == scalers);
        CHECK(std::equal(m.net.params().values().begin(), m.net.params().values().end(),
                         back.model.net.params().values().begin(), back.model.net.params().values().end()));
        const auto b = gradcheck::small_batch(2, 0);
        CHECK(back.model.predict(b.x) == m.predict(b.x));
        CHECK(encode_checkpoint(back.model, back.scalers) == bytes);
    }
    const auto good = encode_checkpoint(gradcheck::small_model(Arch::lstm, 1), scalers);
    CHECK_THROWS_AS(decode_checkpoint("XXXX" + good.substr(4)), InputError);
    CHECK_THROWS_AS(decode_checkpoint(good.substr(0, good.size() / 2)), InputError);
}

}
