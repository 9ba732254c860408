#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topicforge/nn/models.hpp"
#include "topicforge/nn/train.hpp"

namespace topicforge::nn {

inline constexpr double gan_clamp = 1e-7;

/// D output clamped to [eps, 1 - eps]; `clamped` counts saturated calls.
double clamp_probability(double p, std::size_t* clamped = nullptr);

/// V(D, G) = E[log D(w, y)] + E[log(1 - D(w, G(w, z)))].
double gan_value(std::span<const double> d_real, std::span<const double> d_fake);

/// Noise for every sample, sample-major (n x noise_dim).
using Noise = std::vector<double>;

struct GanPass {
    std::vector<double> fake;    // generator outputs
    std::vector<double> d_real;  // clamped
    std::vector<double> d_fake;
    std::size_t clamped = 0;
};

GanPass gan_forward(const Model& gan, const Windows& x, std::span<const double> y, const Noise& z);

/// Discriminator loss -V; gradients w.r.t. D parameters go into `grad`.
double discriminator_loss(const Model& gan, const Windows& x, std::span<const double> y, const Noise& z,
                          std::span<double> grad);

/// E[log(1 - D(G))], or -E[log D(G)] when `non_saturating`; gradients w.r.t.
/// G parameters go into `grad`.
double generator_loss(const Model& gan, const Windows& x, const Noise& z, bool non_saturating, std::span<double> grad);

/// Alternating full-batch Adam steps (gan_lr, gan_beta1), one D step then one
/// G step per epoch.
/// `loss_curve` holds V(D, G) before each epoch's updates.
TrainedForecaster gan_train(const ModelShape& shape, const WindowedDataset& data, const ScalerPair& scalers,
                            const TrainOptions& opts = {});

}  // namespace topicforge::nn
