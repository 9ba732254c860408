#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "topicforge/nn/models.hpp"
#include "topicforge/nn/scaling.hpp"

namespace topicforge::nn {

struct Checkpoint {
    Model model;
    ScalerPair scalers;
};

/// Binary layout, little-endian: "TFC1", u32 version, arch tag, shape fields,
/// then per parameter group a tensor table (name, rows, cols) and the f64
/// values, then the scaler state.
std::string encode_checkpoint(const Model& model, const ScalerPair& scalers);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Model& model, const ScalerPair& scalers);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace topicforge::nn
