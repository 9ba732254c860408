#include "topicforge/nn/params.hpp"

#include <algorithm>
#include <cmath>

#include "topicforge/common/error.hpp"
#include "topicforge/common/rng.hpp"

namespace topicforge::nn {

std::size_t ParamSet::add(std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in) {
    for (const auto& t : tensors_)
        if (t.name == name) throw InputError("duplicate parameter tensor '" + name + "'");
    tensors_.push_back({std::move(name), rows, cols, values_.size(), fan_in});
    values_.resize(values_.size() + rows * cols, 0.0);
    return tensors_.size() - 1;
}

std::size_t ParamSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < tensors_.size(); ++i)
        if (tensors_[i].name == name) return i;
    throw InputError("no parameter tensor '" + std::string(name) + "'");
}

std::span<double> ParamSet::view(std::string_view name) {
    const auto& t = tensors_[find(name)];
    return {values_.data() + t.offset, t.size()};
}

void ParamSet::init_uniform(Rng& rng) {
    for (const auto& t : tensors_) {
        const double s = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(t.fan_in, 1)));
        for (std::size_t i = 0; i < t.size(); ++i) values_[t.offset + i] = rng.uniform(-s, s);
    }
}

void ParamSet::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

}  // namespace topicforge::nn
