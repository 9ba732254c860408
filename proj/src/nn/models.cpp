#include "topicforge/nn/models.hpp"

#include <algorithm>

#include "topicforge/common/error.hpp"

namespace topicforge::nn {

std::string_view arch_name(Arch a) {
    switch (a) {
        case Arch::lstm: return "lstm";
        case Arch::cnn: return "cnn";
        case Arch::cnn_lstm: return "cnn_lstm";
        case Arch::gan: return "gan";
    }
    return "?";
}

Arch parse_arch(std::string_view s) {
    for (Arch a : {Arch::lstm, Arch::cnn, Arch::cnn_lstm, Arch::gan})
        if (arch_name(a) == s) return a;
    throw InputError("unknown model tag '" + std::string(s) + "' (expected lstm, cnn, cnn_lstm or gan)");
}

Stack::Stack(StackSpec spec) : spec_(std::move(spec)) {
    if (spec_.steps == 0 || spec_.features == 0) throw InputError("stack: empty input shape");
    if (spec_.dense.empty() || spec_.dense.back().units != 1) throw InputError("stack: last dense layer must have 1 unit");
    seq_steps_ = spec_.steps;
    seq_channels_ = spec_.features;
    if (spec_.conv_filters) {
        conv_ = Conv1d::create(params_, "conv", spec_.features, spec_.conv_filters, spec_.kernel);
        conv_steps_ = conv_->out_steps(spec_.steps);
        seq_steps_ = conv_steps_;
        seq_channels_ = spec_.conv_filters;
    }
    if (spec_.pool) {
        seq_steps_ = maxpool_steps(seq_steps_, spec_.pool);
        if (seq_steps_ == 0) throw InputError("stack: pooling leaves no steps");
    }
    std::size_t width = seq_steps_ * seq_channels_;
    if (spec_.lstm_hidden) {
        lstm_ = Lstm::create(params_, "lstm", seq_channels_, spec_.lstm_hidden);
        width = spec_.lstm_hidden;
    }
    width += spec_.extra;
    for (std::size_t l = 0; l < spec_.dense.size(); ++l) {
        dense_.push_back(
            Dense::create(params_, "dense" + std::to_string(l), width, spec_.dense[l].units, spec_.dense[l].act));
        width = spec_.dense[l].units;
    }
}

double Stack::forward(const double* x, const double* extra, StackCache& cache, const GateOverride& force) const {
    const double* seq = x;
    if (conv_) {
        cache.conv_z.resize(conv_steps_ * seq_channels_);
        cache.conv_a.resize(conv_steps_ * seq_channels_);
        conv_->forward(params_, x, spec_.steps, cache.conv_z.data(), cache.conv_a.data());
        seq = cache.conv_a.data();
    }
    if (spec_.pool) {
        const std::size_t in_steps = conv_ ? conv_steps_ : spec_.steps;
        cache.pooled.resize(seq_steps_ * seq_channels_);
        cache.pool_idx.resize(seq_steps_ * seq_channels_);
        maxpool_forward(seq, in_steps, seq_channels_, spec_.pool, cache.pooled.data(), cache.pool_idx.data());
        seq = cache.pooled.data();
    }
    cache.vec.clear();
    if (lstm_) {
        lstm_->forward(params_, seq, seq_steps_, cache.lstm, force);
        const double* h = cache.lstm.h.data() + (seq_steps_ - 1) * lstm_->hidden;
        for (std::size_t j = 0; j < lstm_->hidden; ++j)
            cache.vec.push_back(spec_.relu_on_state ? std::max(h[j], 0.0) : h[j]);
    } else {
        cache.vec.assign(seq, seq + seq_steps_ * seq_channels_);
    }
    cache.vec.insert(cache.vec.end(), extra, extra + spec_.extra);
    cache.z.resize(dense_.size());
    cache.a.resize(dense_.size());
    const double* v = cache.vec.data();
    for (std::size_t l = 0; l < dense_.size(); ++l) {
        cache.z[l].resize(dense_[l].out);
        cache.a[l].resize(dense_[l].out);
        dense_[l].forward(params_, v, cache.z[l].data(), cache.a[l].data());
        v = cache.a[l].data();
    }
    return cache.a.back()[0];
}

void Stack::backward(const double* x, const double* extra, const StackCache& cache, double dout, double* grad,
                     double* dextra) const {
    (void)extra;
    std::vector<double> d{dout};
    for (std::size_t l = dense_.size(); l-- > 0;) {
        const double* in = l ? cache.a[l - 1].data() : cache.vec.data();
        std::vector<double> din(dense_[l].in, 0.0);
        dense_[l].backward(params_, in, cache.z[l].data(), cache.a[l].data(), d.data(), grad, din.data());
        d.swap(din);
    }
    const std::size_t body = d.size() - spec_.extra;
    if (dextra)
        for (std::size_t e = 0; e < spec_.extra; ++e) dextra[e] += d[body + e];

    const bool need_seq_grad = conv_.has_value();
    std::vector<double> dseq(seq_steps_ * seq_channels_, 0.0);
    const double* seq = spec_.pool ? cache.pooled.data() : (conv_ ? cache.conv_a.data() : x);
    if (lstm_) {
        const double* h = cache.lstm.h.data() + (seq_steps_ - 1) * lstm_->hidden;
        std::vector<double> dh(lstm_->hidden);
        for (std::size_t j = 0; j < lstm_->hidden; ++j)
            dh[j] = (!spec_.relu_on_state || h[j] > 0.0) ? d[j] : 0.0;
        lstm_->backward(params_, seq, cache.lstm, dh.data(), grad, need_seq_grad ? dseq.data() : nullptr);
    } else {
        std::copy(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(body), dseq.begin());
    }
    if (!conv_) return;
    std::vector<double> dconv;
    if (spec_.pool) {
        dconv.assign(conv_steps_ * seq_channels_, 0.0);
        maxpool_backward(dseq.data(), seq_steps_, seq_channels_, cache.pool_idx.data(), dconv.data());
    } else {
        dconv = std::move(dseq);
    }
    conv_->backward(params_, x, spec_.steps, cache.conv_z.data(), dconv.data(), grad, nullptr);
}

std::vector<double> Stack::predict(const Windows& x) const {
    if (spec_.extra) throw InputError("stack: predict needs the extra inputs");
    if (x.steps != spec_.steps || x.features != spec_.features)
        throw InputError("stack: input shape " + std::to_string(x.steps) + "x" + std::to_string(x.features) +
                         " does not match model " + std::to_string(spec_.steps) + "x" +
                         std::to_string(spec_.features));
    std::vector<double> out(x.n);
    StackCache cache;
    for (std::size_t i = 0; i < x.n; ++i) out[i] = forward(x.sample(i), nullptr, cache);
    return out;
}

StackSpec forecaster_spec(Arch arch, const ModelShape& shape, std::size_t steps, std::size_t features) {
    StackSpec s;
    s.steps = steps;
    s.features = features;
    switch (arch) {
        case Arch::lstm:
            s.lstm_hidden = shape.lstm_hidden;
            s.dense = {{1, Activation::identity}};
            break;
        case Arch::cnn:
            s.conv_filters = shape.conv_filters;
            s.kernel = shape.kernel;
            s.pool = shape.pool;
            s.dense = {{shape.dense_units, Activation::relu}, {1, Activation::identity}};
            break;
        case Arch::cnn_lstm:
            s.conv_filters = shape.conv_filters;
            s.kernel = shape.kernel;
            s.lstm_hidden = shape.lstm_hidden;
            s.dense = {{1, Activation::identity}};
            break;
        case Arch::gan: return generator_spec(shape, steps, features);
    }
    return s;
}

StackSpec generator_spec(const ModelShape& shape, std::size_t steps, std::size_t features) {
    if (shape.noise_dim == 0) throw InputError("gan: noise_dim must be >= 1");
    StackSpec s;
    s.steps = steps;
    s.features = features;
    s.lstm_hidden = shape.gan_hidden;
    s.relu_on_state = false;
    s.extra = shape.noise_dim;
    s.dense = {{1, Activation::identity}};
    return s;
}

StackSpec discriminator_spec(const ModelShape& shape, std::size_t steps, std::size_t features) {
    StackSpec s;
    s.steps = steps;
    s.features = features;
    s.extra = 1;
    s.dense = {{shape.disc_units, Activation::relu}, {1, Activation::sigmoid}};
    return s;
}

Model Model::create(Arch arch, const ModelShape& shape, std::size_t lookback, std::size_t features) {
    Model m;
    m.arch = arch;
    m.shape = shape;
    m.lookback = lookback;
    m.features = features;
    m.net = Stack(forecaster_spec(arch, shape, lookback, features));
    if (arch == Arch::gan) m.disc = Stack(discriminator_spec(shape, lookback, features));
    return m;
}

std::vector<double> Model::predict(const Windows& x) const {
    if (arch != Arch::gan) return net.predict(x);
    if (x.steps != lookback || x.features != features) throw InputError("gan: input shape does not match model");
    std::vector<double> z(shape.noise_dim, 0.0), out(x.n);
    StackCache cache;
    for (std::size_t i = 0; i < x.n; ++i) out[i] = net.forward(x.sample(i), z.data(), cache);
    return out;
}

}  // namespace topicforge::nn
