#include "topicforge/nn/gan.hpp"

#include <algorithm>
#include <cmath>

#include "topicforge/common/error.hpp"
#include "topicforge/common/rng.hpp"

namespace topicforge::nn {

double clamp_probability(double p, std::size_t* clamped) {
    if (p < gan_clamp || p > 1.0 - gan_clamp) {
        if (clamped) ++*clamped;
        return std::clamp(p, gan_clamp, 1.0 - gan_clamp);
    }
    return p;
}

double gan_value(std::span<const double> d_real, std::span<const double> d_fake) {
    if (d_real.empty() || d_fake.empty()) throw InputError("gan_value: empty batch");
    double real = 0.0, fake = 0.0;
    for (double d : d_real) real += std::log(clamp_probability(d));
    for (double d : d_fake) fake += std::log(1.0 - clamp_probability(d));
    return real / static_cast<double>(d_real.size()) + fake / static_cast<double>(d_fake.size());
}

namespace {

void check(const Model& gan, const Windows& x, const Noise& z) {
    if (gan.arch != Arch::gan) throw InputError("gan: model is not a gan");
    if (z.size() != x.n * gan.shape.noise_dim) throw InputError("gan: noise size does not match batch");
    if (x.n == 0) throw InputError("gan: empty batch");
}

bool inside(double p) { return p >= gan_clamp && p <= 1.0 - gan_clamp; }

}  // namespace

GanPass gan_forward(const Model& gan, const Windows& x, std::span<const double> y, const Noise& z) {
    check(gan, x, z);
    GanPass pass;
    StackCache gc, dc;
    for (std::size_t s = 0; s < x.n; ++s) {
        const double fake = gan.net.forward(x.sample(s), z.data() + s * gan.shape.noise_dim, gc);
        pass.fake.push_back(fake);
        pass.d_fake.push_back(clamp_probability(gan.disc.forward(x.sample(s), &fake, dc), &pass.clamped));
        if (!y.empty()) pass.d_real.push_back(clamp_probability(gan.disc.forward(x.sample(s), &y[s], dc), &pass.clamped));
    }
    return pass;
}

double discriminator_loss(const Model& gan, const Windows& x, std::span<const double> y, const Noise& z,
                          std::span<double> grad) {
    check(gan, x, z);
    if (y.size() != x.n) throw InputError("gan: target count does not match sample count");
    const double n = static_cast<double>(x.n);
    StackCache gc, dc;
    double loss = 0.0;
    for (std::size_t s = 0; s < x.n; ++s) {
        const double fake = gan.net.forward(x.sample(s), z.data() + s * gan.shape.noise_dim, gc);
        const double dr = gan.disc.forward(x.sample(s), &y[s], dc);
        loss -= std::log(clamp_probability(dr));
        if (!grad.empty() && inside(dr)) gan.disc.backward(x.sample(s), &y[s], dc, -1.0 / (dr * n), grad.data(), nullptr);
        const double df = gan.disc.forward(x.sample(s), &fake, dc);
        loss -= std::log(1.0 - clamp_probability(df));
        if (!grad.empty() && inside(df))
            gan.disc.backward(x.sample(s), &fake, dc, 1.0 / ((1.0 - df) * n), grad.data(), nullptr);
    }
    return loss / n;
}

double generator_loss(const Model& gan, const Windows& x, const Noise& z, bool non_saturating, std::span<double> grad) {
    check(gan, x, z);
    const double n = static_cast<double>(x.n);
    const std::size_t nz = gan.shape.noise_dim;
    StackCache gc, dc;
    std::vector<double> scratch(gan.disc.params().size());
    double loss = 0.0;
    for (std::size_t s = 0; s < x.n; ++s) {
        const double fake = gan.net.forward(x.sample(s), z.data() + s * nz, gc);
        const double df = gan.disc.forward(x.sample(s), &fake, dc);
        const double p = clamp_probability(df);
        loss += non_saturating ? -std::log(p) : std::log(1.0 - p);
        if (grad.empty() || !inside(df)) continue;
        const double dp = non_saturating ? -1.0 / (df * n) : -1.0 / ((1.0 - df) * n);
        double dfake = 0.0;
        gan.disc.backward(x.sample(s), &fake, dc, dp, scratch.data(), &dfake);
        gan.net.backward(x.sample(s), z.data() + s * nz, gc, dfake, grad.data(), nullptr);
    }
    return loss / n;
}

TrainedForecaster gan_train(const ModelShape& shape, const WindowedDataset& data, const ScalerPair& scalers,
                            const TrainOptions& opts) {
    if (data.x_train.n == 0) throw InputError("gan_train: empty training set");
    TrainedForecaster out;
    out.scalers = scalers;
    out.model = Model::create(Arch::gan, shape, data.lookback, data.x_train.features);
    Model& gan = out.model;
    Rng rng(opts.seed);
    gan.net.params().init_uniform(rng);
    gan.disc.params().init_uniform(rng);

    Adam adam_g{opts.gan_lr, opts.gan_beta1, opts.beta2, opts.eps, {}, {}, 0};
    Adam adam_d = adam_g;
    std::vector<double> grad_g(gan.net.params().size()), grad_d(gan.disc.params().size());
    const Windows& x = data.x_train;
    Noise z(x.n * shape.noise_dim);
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        for (double& v : z) v = rng.normal();
        const GanPass pass = gan_forward(gan, x, data.y_train, z);
        out.gan.clamp_events += pass.clamped;
        const double value = gan_value(pass.d_real, pass.d_fake);
        if (!std::isfinite(value)) throw NumericError("non-finite gan value at epoch " + std::to_string(epoch + 1));
        out.loss_curve.push_back(value);
        std::size_t correct = 0;
        for (double d : pass.d_real) correct += d > 0.5;
        for (double d : pass.d_fake) correct += d < 0.5;
        out.gan.d_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(2 * x.n));

        std::fill(grad_d.begin(), grad_d.end(), 0.0);
        discriminator_loss(gan, x, data.y_train, z, grad_d);
        adam_d.step(gan.disc.params().values(), grad_d);
        std::fill(grad_g.begin(), grad_g.end(), 0.0);
        generator_loss(gan, x, z, opts.non_saturating, grad_g);
        adam_g.step(gan.net.params().values(), grad_g);
    }
    out.train_pred = predict_unscaled(gan, data.x_train, scalers);
    out.test_pred = predict_unscaled(gan, data.x_test, scalers);
    return out;
}

}  // namespace topicforge::nn
