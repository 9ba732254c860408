#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topicforge/nn/dataset.hpp"
#include "topicforge/nn/layers.hpp"
#include "topicforge/nn/params.hpp"

namespace topicforge::nn {

enum class Arch { lstm, cnn, cnn_lstm, gan };

std::string_view arch_name(Arch a);
Arch parse_arch(std::string_view s);  // throws InputError on unknown tag

struct ModelShape {
    std::size_t lstm_hidden = 50;
    std::size_t conv_filters = 64;
    std::size_t kernel = 2;
    std::size_t pool = 2;
    std::size_t dense_units = 50;
    std::size_t gan_hidden = 32;
    std::size_t disc_units = 32;
    std::size_t noise_dim = 4;

    friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct DenseSpec {
    std::size_t units = 1;
    Activation act = Activation::identity;
};

/// A feed-forward pipeline over one window:
///   [conv] -> [pool] -> (lstm -> [relu] on h_T | flatten) -> concat extra -> dense...
struct StackSpec {
    std::size_t steps = 0;
    std::size_t features = 0;
    std::size_t conv_filters = 0;  // 0 = no conv
    std::size_t kernel = 2;
    std::size_t pool = 0;          // 0 = no pool
    std::size_t lstm_hidden = 0;   // 0 = no lstm
    bool relu_on_state = true;
    std::size_t extra = 0;         // values appended after the sequence stage
    std::vector<DenseSpec> dense;
};

struct StackCache {
    std::vector<double> conv_z, conv_a;
    std::vector<double> pooled;
    std::vector<std::size_t> pool_idx;
    LstmCache lstm;
    std::vector<double> vec;  // input of the first dense layer
    std::vector<std::vector<double>> z, a;
};

class Stack {
public:
    Stack() = default;
    explicit Stack(StackSpec spec);

    const StackSpec& spec() const { return spec_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

    /// Single scalar output.
    double forward(const double* x, const double* extra, StackCache& cache, const GateOverride& force = {}) const;
    void backward(const double* x, const double* extra, const StackCache& cache, double dout, double* grad,
                  double* dextra) const;

    std::vector<double> predict(const Windows& x) const;  // requires spec().extra == 0

private:
    StackSpec spec_;
    ParamSet params_;
    std::optional<Conv1d> conv_;
    std::optional<Lstm> lstm_;
    std::vector<Dense> dense_;
    std::size_t seq_steps_ = 0;     // steps entering the lstm / flatten
    std::size_t seq_channels_ = 0;
    std::size_t conv_steps_ = 0;
};

StackSpec forecaster_spec(Arch arch, const ModelShape& shape, std::size_t steps, std::size_t features);
StackSpec generator_spec(const ModelShape& shape, std::size_t steps, std::size_t features);
StackSpec discriminator_spec(const ModelShape& shape, std::size_t steps, std::size_t features);

/// A forecaster, or for `gan` a generator plus discriminator.
struct Model {
    Arch arch = Arch::lstm;
    ModelShape shape;
    std::size_t lookback = 0;
    std::size_t features = 0;
    Stack net;
    Stack disc;  // gan only

    static Model create(Arch arch, const ModelShape& shape, std::size_t lookback, std::size_t features);
    /// Scaled predictions; the generator runs with z = 0.
    std::vector<double> predict(const Windows& x) const;
};

}  // namespace topicforge::nn
