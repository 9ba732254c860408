#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topicforge/nn/params.hpp"

namespace topicforge::nn {

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

enum class Activation { identity, relu, sigmoid };

/// y = act(W x + b), W stored row-major (out x in).
struct Dense {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation act = Activation::identity;
    std::size_t w = 0, b = 0;  // tensor ids

    static Dense create(ParamSet& p, const std::string& prefix, std::size_t in, std::size_t out, Activation act);
    void forward(const ParamSet& p, const double* x, double* z, double* a) const;
    /// Adds parameter gradients into `grad`; writes dL/dx into `dx` if non-null.
    void backward(const ParamSet& p, const double* x, const double* z, const double* a, const double* da, double* grad,
                  double* dx) const;
};

struct LstmCache {
    std::size_t steps = 0;
    std::vector<double> f, i, o, g, c, h;  // step x hidden; g is the candidate
};

struct GateOverride {
    std::optional<double> forget;
    std::optional<double> input;
};

/// Gates in order forget, candidate, input, output; each has W_?x (hidden x
/// in), W_?h (hidden x hidden) and b_?. h_0 = C_0 = 0.
struct Lstm {
    std::size_t in = 0;
    std::size_t hidden = 0;
    std::size_t wx[4] = {}, wh[4] = {}, b[4] = {};

    enum Gate { forget = 0, candidate = 1, input = 2, output = 3 };

    static Lstm create(ParamSet& p, const std::string& prefix, std::size_t in, std::size_t hidden);
    void forward(const ParamSet& p, const double* seq, std::size_t steps, LstmCache& cache,
                 const GateOverride& force = {}) const;
    /// Backpropagation through time from dL/dh_T only.
    void backward(const ParamSet& p, const double* seq, const LstmCache& cache, const double* dh_last, double* grad,
                  double* dseq) const;
};

/// Valid cross-correlation over time followed by ReLU. Input and output are
/// step x channel row-major.
struct Conv1d {
    std::size_t channels = 0;
    std::size_t filters = 0;
    std::size_t kernel = 0;
    bool relu = true;
    std::size_t w = 0, b = 0;  // w: filters x (kernel * channels)

    static Conv1d create(ParamSet& p, const std::string& prefix, std::size_t channels, std::size_t filters,
                         std::size_t kernel);
    std::size_t out_steps(std::size_t steps) const;  // throws InputError when steps < kernel
    void forward(const ParamSet& p, const double* x, std::size_t steps, double* z, double* a) const;
    void backward(const ParamSet& p, const double* x, std::size_t steps, const double* z, const double* da,
                  double* grad, double* dx) const;
};

/// Max over non-overlapping windows along time; a trailing remainder is dropped.
/// `argmax` records the winning input step per output cell.
std::size_t maxpool_steps(std::size_t steps, std::size_t pool);
void maxpool_forward(const double* x, std::size_t steps, std::size_t channels, std::size_t pool, double* y,
                     std::size_t* argmax);
void maxpool_backward(const double* dy, std::size_t out_steps, std::size_t channels, const std::size_t* argmax,
                      double* dx);

/// Convenience for single-channel use: pools a plain vector.
std::vector<double> maxpool(const std::vector<double>& x, std::size_t pool = 2);

}  // namespace topicforge::nn
