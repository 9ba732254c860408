#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topicforge {
class Rng;
}

namespace topicforge::nn {

struct TensorInfo {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;
    std::size_t fan_in = 0;

    std::size_t size() const { return rows * cols; }
};

/// Named tensors packed into one flat vector; gradients use the same layout.
class ParamSet {
public:
    std::size_t add(std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in);

    std::size_t size() const { return values_.size(); }
    const std::vector<TensorInfo>& tensors() const { return tensors_; }
    const TensorInfo& info(std::size_t t) const { return tensors_[t]; }
    std::size_t find(std::string_view name) const;  // throws InputError

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double* data(std::size_t t) { return values_.data() + tensors_[t].offset; }
    const double* data(std::size_t t) const { return values_.data() + tensors_[t].offset; }
    std::span<double> view(std::string_view name);

    /// Uniform(-s, s) with s = 1 / sqrt(fan_in), tensors in insertion order.
    void init_uniform(Rng& rng);
    void fill(double v);

private:
    std::vector<TensorInfo> tensors_;
    std::vector<double> values_;
};

}  // namespace topicforge::nn
