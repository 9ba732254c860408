#include "topicforge/nn/layers.hpp"

#include <algorithm>

#include "topicforge/common/error.hpp"
#include "topicforge/kernels.hpp"

namespace topicforge::nn {

namespace {

double activate(Activation act, double z) {
    switch (act) {
        case Activation::identity: return z;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::sigmoid: return sigmoid(z);
    }
    return z;
}

double activation_grad(Activation act, double z, double a) {
    switch (act) {
        case Activation::identity: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: return a * (1.0 - a);
    }
    return 1.0;
}

}  // namespace

Dense Dense::create(ParamSet& p, const std::string& prefix, std::size_t in, std::size_t out, Activation act) {
    Dense d;
    d.in = in;
    d.out = out;
    d.act = act;
    d.w = p.add(prefix + ".W", out, in, in);
    d.b = p.add(prefix + ".b", out, 1, in);
    return d;
}

void Dense::forward(const ParamSet& p, const double* x, double* z, double* a) const {
    const auto& k = kernels::current();
    const double* W = p.data(w);
    const double* B = p.data(b);
    for (std::size_t o = 0; o < out; ++o) {
        z[o] = k.dot(W + o * in, x, in) + B[o];
        a[o] = activate(act, z[o]);
    }
}

void Dense::backward(const ParamSet& p, const double* x, const double* z, const double* a, const double* da,
                     double* grad, double* dx) const {
    const auto& k = kernels::current();
    const double* W = p.data(w);
    double* dW = grad + p.info(w).offset;
    double* dB = grad + p.info(b).offset;
    for (std::size_t o = 0; o < out; ++o) {
        const double dz = da[o] * activation_grad(act, z[o], a[o]);
        if (dz == 0.0) continue;
        k.axpy(dz, x, dW + o * in, in);
        dB[o] += dz;
        if (dx) k.axpy(dz, W + o * in, dx, in);
    }
}

Lstm Lstm::create(ParamSet& p, const std::string& prefix, std::size_t in, std::size_t hidden) {
    static constexpr const char* gate_names[4] = {"f", "c", "i", "o"};
    Lstm l;
    l.in = in;
    l.hidden = hidden;
    const std::size_t fan_in = in + hidden;
    for (int g = 0; g < 4; ++g) {
        const std::string n = gate_names[g];
        l.wx[g] = p.add(prefix + ".W_" + n + "x", hidden, in, fan_in);
        l.wh[g] = p.add(prefix + ".W_" + n + "h", hidden, hidden, fan_in);
        l.b[g] = p.add(prefix + ".b_" + n, hidden, 1, fan_in);
    }
    return l;
}

void Lstm::forward(const ParamSet& p, const double* seq, std::size_t steps, LstmCache& cache,
                   const GateOverride& force) const {
    const auto& k = kernels::current();
    const std::size_t H = hidden;
    cache.steps = steps;
    for (auto* v : {&cache.f, &cache.i, &cache.o, &cache.g, &cache.c, &cache.h}) v->assign(steps * H, 0.0);
    std::vector<double> zero(H, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        const double* x = seq + t * in;
        const double* h_prev = t ? cache.h.data() + (t - 1) * H : zero.data();
        const double* c_prev = t ? cache.c.data() + (t - 1) * H : zero.data();
        double* gate_out[4] = {cache.f.data() + t * H, cache.g.data() + t * H, cache.i.data() + t * H,
                               cache.o.data() + t * H};
        for (int g = 0; g < 4; ++g) {
            const double* Wx = p.data(wx[g]);
            const double* Wh = p.data(wh[g]);
            const double* B = p.data(b[g]);
            for (std::size_t j = 0; j < H; ++j) {
                const double z = k.dot(Wx + j * in, x, in) + k.dot(Wh + j * H, h_prev, H) + B[j];
                gate_out[g][j] = g == candidate ? std::tanh(z) : sigmoid(z);
            }
        }
        if (force.forget) std::fill(gate_out[forget], gate_out[forget] + H, *force.forget);
        if (force.input) std::fill(gate_out[input], gate_out[input] + H, *force.input);
        double* c = cache.c.data() + t * H;
        double* h = cache.h.data() + t * H;
        for (std::size_t j = 0; j < H; ++j) {
            c[j] = gate_out[forget][j] * c_prev[j] + gate_out[input][j] * gate_out[candidate][j];
            h[j] = gate_out[output][j] * std::tanh(c[j]);
        }
    }
}

void Lstm::backward(const ParamSet& p, const double* seq, const LstmCache& cache, const double* dh_last, double* grad,
                    double* dseq) const {
    const auto& k = kernels::current();
    const std::size_t H = hidden;
    const std::size_t T = cache.steps;
    std::vector<double> dh(dh_last, dh_last + H), dc(H, 0.0), dh_prev(H), zero(H, 0.0);
    std::vector<double> da[4];
    for (auto& v : da) v.resize(H);
    for (std::size_t t = T; t-- > 0;) {
        const double* x = seq + t * in;
        const double* h_prev = t ? cache.h.data() + (t - 1) * H : zero.data();
        const double* c_prev = t ? cache.c.data() + (t - 1) * H : zero.data();
        const double* f = cache.f.data() + t * H;
        const double* i = cache.i.data() + t * H;
        const double* o = cache.o.data() + t * H;
        const double* g = cache.g.data() + t * H;
        const double* c = cache.c.data() + t * H;
        for (std::size_t j = 0; j < H; ++j) {
            const double tc = std::tanh(c[j]);
            const double d_o = dh[j] * tc;
            dc[j] += dh[j] * o[j] * (1.0 - tc * tc);
            da[forget][j] = dc[j] * c_prev[j] * f[j] * (1.0 - f[j]);
            da[input][j] = dc[j] * g[j] * i[j] * (1.0 - i[j]);
            da[candidate][j] = dc[j] * i[j] * (1.0 - g[j] * g[j]);
            da[output][j] = d_o * o[j] * (1.0 - o[j]);
            dc[j] *= f[j];
        }
        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        for (int gt = 0; gt < 4; ++gt) {
            const double* Wx = p.data(wx[gt]);
            const double* Wh = p.data(wh[gt]);
            double* dWx = grad + p.info(wx[gt]).offset;
            double* dWh = grad + p.info(wh[gt]).offset;
            double* dB = grad + p.info(b[gt]).offset;
            for (std::size_t j = 0; j < H; ++j) {
                const double a = da[gt][j];
                if (a == 0.0) continue;
                k.axpy(a, x, dWx + j * in, in);
                k.axpy(a, h_prev, dWh + j * H, H);
                dB[j] += a;
                if (dseq) k.axpy(a, Wx + j * in, dseq + t * in, in);
                k.axpy(a, Wh + j * H, dh_prev.data(), H);
            }
        }
        dh.swap(dh_prev);
    }
}

Conv1d Conv1d::create(ParamSet& p, const std::string& prefix, std::size_t channels, std::size_t filters,
                      std::size_t kernel) {
    Conv1d c;
    c.channels = channels;
    c.filters = filters;
    c.kernel = kernel;
    c.w = p.add(prefix + ".w", filters, kernel * channels, kernel * channels);
    c.b = p.add(prefix + ".b", filters, 1, kernel * channels);
    return c;
}

std::size_t Conv1d::out_steps(std::size_t steps) const {
    if (steps < kernel)
        throw InputError("conv1d: input length " + std::to_string(steps) + " is shorter than kernel " +
                         std::to_string(kernel));
    return steps - kernel + 1;
}

void Conv1d::forward(const ParamSet& p, const double* x, std::size_t steps, double* z, double* a) const {
    const auto& k = kernels::current();
    const std::size_t L = out_steps(steps);
    const std::size_t patch = kernel * channels;
    const double* W = p.data(w);
    const double* B = p.data(b);
    for (std::size_t j = 0; j < L; ++j)
        for (std::size_t f = 0; f < filters; ++f) {
            const double v = k.dot(W + f * patch, x + j * channels, patch) + B[f];
            z[j * filters + f] = v;
            a[j * filters + f] = relu ? std::max(v, 0.0) : v;
        }
}

void Conv1d::backward(const ParamSet& p, const double* x, std::size_t steps, const double* z, const double* da,
                      double* grad, double* dx) const {
    const auto& k = kernels::current();
    const std::size_t L = out_steps(steps);
    const std::size_t patch = kernel * channels;
    const double* W = p.data(w);
    double* dW = grad + p.info(w).offset;
    double* dB = grad + p.info(b).offset;
    for (std::size_t j = 0; j < L; ++j)
        for (std::size_t f = 0; f < filters; ++f) {
            const double dz = (!relu || z[j * filters + f] > 0.0) ? da[j * filters + f] : 0.0;
            if (dz == 0.0) continue;
            k.axpy(dz, x + j * channels, dW + f * patch, patch);
            dB[f] += dz;
            if (dx) k.axpy(dz, W + f * patch, dx + j * channels, patch);
        }
}

std::size_t maxpool_steps(std::size_t steps, std::size_t pool) {
    if (pool == 0) throw InputError("maxpool: pool size must be >= 1");
    return steps / pool;
}

void maxpool_forward(const double* x, std::size_t steps, std::size_t channels, std::size_t pool, double* y,
                     std::size_t* argmax) {
    const std::size_t L = maxpool_steps(steps, pool);
    for (std::size_t j = 0; j < L; ++j)
        for (std::size_t c = 0; c < channels; ++c) {
            std::size_t best = j * pool;
            for (std::size_t s = j * pool + 1; s < (j + 1) * pool; ++s)
                if (x[s * channels + c] > x[best * channels + c]) best = s;
            y[j * channels + c] = x[best * channels + c];
            argmax[j * channels + c] = best;
        }
}

void maxpool_backward(const double* dy, std::size_t out_steps, std::size_t channels, const std::size_t* argmax,
                      double* dx) {
    for (std::size_t j = 0; j < out_steps; ++j)
        for (std::size_t c = 0; c < channels; ++c) dx[argmax[j * channels + c] * channels + c] += dy[j * channels + c];
}

std::vector<double> maxpool(const std::vector<double>& x, std::size_t pool) {
    const std::size_t L = maxpool_steps(x.size(), pool);
    std::vector<double> y(L);
    std::vector<std::size_t> idx(L);
    maxpool_forward(x.data(), x.size(), 1, pool, y.data(), idx.data());
    return y;
}

}  // namespace topicforge::nn
