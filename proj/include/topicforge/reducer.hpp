#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace topicforge::reducer {

/// Dense row-major point set.
struct Points {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

/// Exact k nearest neighbours, self excluded, sorted by (distance, index).
struct Neighbors {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> index;  // n*k
    std::vector<double> distance;      // n*k, Euclidean

    std::uint32_t at(std::size_t i, std::size_t j) const { return index[i * k + j]; }
    double dist(std::size_t i, std::size_t j) const { return distance[i * k + j]; }
};

Neighbors knn_graph(const Points& x, std::size_t k);

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;  // i < j
    double weight = 0.0;  // in (0, 1]
};

struct FuzzyGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<Edge> edges;  // symmetrized, each pair once, sorted by (i, j)
    std::vector<double> rho;
    std::vector<double> sigma;
};

/// a + b - a*b, the probabilistic union of the two directed weights.
inline double symmetrize(double a, double b) { return a + b - a * b; }

FuzzyGraph fuzzy_weights(const Neighbors& knn);

struct CurveParams {
    double a = 1.0;
    double b = 1.0;
    bool fitted = false;  // false when the fit failed and (1, 1) is in use
};

/// Least-squares fit of 1 / (1 + a d^(2b)) to the target membership curve.
CurveParams curve_params(double min_dist);

inline double low_dim_weight(double dist_sq, const CurveParams& c) {
    return 1.0 / (1.0 + c.a * std::pow(dist_sq, c.b));
}

struct LayoutOptions {
    std::size_t out_dim = 5;
    std::size_t epochs = 200;
    std::uint64_t seed = 42;
    double learning_rate = 1.0;
    std::size_t neg_samples = 5;
    double min_dist = 0.1;
    bool fixed_curve = false;  // use a = b = 1 instead of fitting
};

struct Layout {
    std::size_t n = 0;
    std::size_t out_dim = 0;
    std::vector<double> y;  // n*out_dim row-major
    std::vector<double> epoch_ce;

    Points points() const { return {n, out_dim, y}; }
};

/// Cross-entropy term of one pair with low-dim weight clamped to
/// [1e-4, 1 - 1e-4]; zero when the two weights agree.
double cross_entropy_term(double w_high, double w_low);

Layout optimize_layout(const FuzzyGraph& graph, const LayoutOptions& opts);

struct ReduceOptions {
    std::size_t k = 15;
    LayoutOptions layout;
};

Layout reduce(const Points& x, const ReduceOptions& opts);

/// Mean fraction of each point's `k_high` nearest neighbours in `high` that
/// are among its `k_low` nearest neighbours in `low`.
double knn_preservation(const Points& high, const Points& low, std::size_t k_high = 10, std::size_t k_low = 15);

std::string layout_csv(const Layout& layout, std::span<const std::string> doc_ids);

}  // namespace topicforge::reducer
