#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topicforge::embeddings {

/// Row-major n_docs x dim matrix of float32, one row per document.
struct EmbeddingMatrix {
    std::uint32_t n_docs = 0;
    std::uint32_t dim = 0;
    bool normalized = false;
    std::vector<float> values;
    std::vector<std::string> doc_ids;
    std::vector<std::string> trailer;  // `#` comment lines after the ids

    std::span<const float> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
    std::vector<double> row_f64(std::size_t i) const;
    /// Whole matrix widened to double, row-major.
    std::vector<double> to_f64() const;
};

/// EMB1 layout, little-endian:
///   "EMB1" | u32 n_docs | u32 dim | u8 normalized | n_docs*dim f32 row-major |
///   n_docs lines of UTF-8 doc ids, each terminated by '\n' |
///   optional '#'-prefixed comment lines.
std::string encode(const EmbeddingMatrix& m);
EmbeddingMatrix decode(std::string_view bytes);

void save(const EmbeddingMatrix& m, const std::filesystem::path& path);

/// With `expected_ids`, the file's ids must be a permutation of them.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path,
                                std::optional<std::span<const std::string>> expected_ids = std::nullopt);

inline constexpr std::uint32_t hashed_vocabulary_size = 1u << 16;

/// Hashed bag-of-words with TF-IDF weights, projected to `dim` through a
/// seeded +-1 random matrix and L2-normalized. Deterministic in
/// (corpus, dim, seed).
EmbeddingMatrix fallback_embed(std::span<const std::string> corpus, std::span<const std::string> doc_ids,
                               std::uint32_t dim, std::uint64_t seed);

}  // namespace topicforge::embeddings
