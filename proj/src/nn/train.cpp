#include "topicforge/nn/train.hpp"

#include <algorithm>
#include <cmath>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/common/rng.hpp"
#include "topicforge/nn/gan.hpp"

namespace topicforge::nn {

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (m.size() != params.size()) {
        m.assign(params.size(), 0.0);
        v.assign(params.size(), 0.0);
        t = 0;
    }
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
}

double mse_loss(const Stack& net, const Windows& x, std::span<const double> y, std::span<double> grad,
                std::size_t begin, std::size_t end) {
    if (y.size() != x.n) throw InputError("mse_loss: target count does not match sample count");
    end = std::min(end, x.n);
    if (begin >= end) throw InputError("mse_loss: empty batch");
    const double n = static_cast<double>(end - begin);
    StackCache cache;
    double loss = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
        const double o = net.forward(x.sample(s), nullptr, cache);
        const double e = o - y[s];
        loss += e * e;
        if (!grad.empty()) net.backward(x.sample(s), nullptr, cache, 2.0 * e / n, grad.data(), nullptr);
    }
    return loss / n;
}

std::vector<double> predict_unscaled(const Model& model, const Windows& x, const ScalerPair& scalers) {
    auto out = model.predict(x);
    for (double& v : out) v = scalers.target.inverse(v);
    return out;
}

TrainedForecaster train(Arch arch, const ModelShape& shape, const WindowedDataset& data, const ScalerPair& scalers,
                        const TrainOptions& opts) {
    if (arch == Arch::gan) return gan_train(shape, data, scalers, opts);
    if (data.x_train.n == 0) throw InputError("train: empty training set");
    TrainedForecaster out;
    out.scalers = scalers;
    out.model = Model::create(arch, shape, data.lookback, data.x_train.features);
    Rng rng(opts.seed);
    Stack& net = out.model.net;
    net.params().init_uniform(rng);

    Adam adam{opts.lr, opts.beta1, opts.beta2, opts.eps, {}, {}, 0};
    std::vector<double> grad(net.params().size());
    const std::size_t n = data.x_train.n;
    const std::size_t batch = opts.batch_size == 0 ? n : std::min(opts.batch_size, n);
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < n; b += batch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            const std::size_t e = std::min(b + batch, n);
            const double l = mse_loss(net, data.x_train, data.y_train, grad, b, e);
            if (!std::isfinite(l)) throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1));
            epoch_loss += l * static_cast<double>(e - b);
            adam.step(net.params().values(), grad);
        }
        out.loss_curve.push_back(epoch_loss / static_cast<double>(n));
    }
    out.train_pred = predict_unscaled(out.model, data.x_train, scalers);
    out.test_pred = predict_unscaled(out.model, data.x_test, scalers);
    return out;
}

std::string loss_curve_csv(std::span<const double> loss_curve) {
    std::string out = "epoch,loss\n";
    for (std::size_t e = 0; e < loss_curve.size(); ++e)
        out += std::to_string(e + 1) + "," + csv::format_double(loss_curve[e]) + "\n";
    return out;
}

}  // namespace topicforge::nn
