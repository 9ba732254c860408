#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topicforge/nn/dataset.hpp"
#include "topicforge/nn/models.hpp"
#include "topicforge/nn/scaling.hpp"

namespace topicforge::nn {

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m, v;
    std::uint64_t t = 0;

    void step(std::span<double> params, std::span<const double> grad);
};

struct TrainOptions {
    std::size_t epochs = 200;
    std::uint64_t seed = 42;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t batch_size = 0;  // 0 = full batch
    bool non_saturating = false; // gan generator objective
    // The gan pair has its own Adam settings; lower momentum damps the
    // rotation between generator and discriminator.
    double gan_lr = 2e-4;
    double gan_beta1 = 0.5;
};

/// Mean over samples of (o - y)^2. Gradients are
/// accumulated into `grad` when it is non-empty.
double mse_loss(const Stack& net, const Windows& x, std::span<const double> y, std::span<double> grad,
                std::size_t begin = 0, std::size_t end = static_cast<std::size_t>(-1));

struct GanDiagnostics {
    std::vector<double> d_accuracy;  // per epoch, real and fake samples pooled
    std::size_t clamp_events = 0;
};

struct TrainedForecaster {
    Model model;
    ScalerPair scalers;
    std::vector<double> loss_curve;
    std::vector<double> train_pred;  // unscaled
    std::vector<double> test_pred;
    GanDiagnostics gan;
};

TrainedForecaster train(Arch arch, const ModelShape& shape, const WindowedDataset& data, const ScalerPair& scalers,
                        const TrainOptions& opts = {});

/// Forward pass followed by inverse target scaling.
std::vector<double> predict_unscaled(const Model& model, const Windows& x, const ScalerPair& scalers);

std::string loss_curve_csv(std::span<const double> loss_curve);

}  // namespace topicforge::nn
