#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/reducer.hpp"

using namespace topicforge;
using namespace topicforge::reducer;

namespace {

Points line(std::initializer_list<double> xs) {
    Points p;
    p.n = xs.size();
    p.dim = 1;
    p.values = xs;
    return p;
}

Points to_points(const fixtures::Blobs& b) {
    Points p;
    p.n = b.points.size();
    p.dim = b.points[0].size();
    for (const auto& row : b.points) p.values.insert(p.values.end(), row.begin(), row.end());
    return p;
}

Points random_points(Rng& rng, std::size_t n, std::size_t dim) {
    Points p{n, dim, std::vector<double>(n * dim)};
    for (auto& v : p.values) v = rng.uniform(-1, 1);
    return p;
}

}  // namespace

TEST_SUITE("reducer") {

TEST_CASE("knn on collinear points") {
    const auto nn = knn_graph(line({0, 1, 3}), 1);
    CHECK(nn.at(0, 0) == 1);
    CHECK(nn.at(1, 0) == 0);
    CHECK(nn.at(2, 0) == 1);
    CHECK_THROWS_AS(knn_graph(line({0, 1, 3}), 3), InputError);
}

TEST_CASE("duplicate point is the first neighbour") {
    const auto nn = knn_graph(line({5, 0, 5, 9}), 2);
    CHECK(nn.at(0, 0) == 2);
    CHECK(nn.dist(0, 0) == 0.0);
    CHECK(nn.at(2, 0) == 0);
}

TEST_CASE("knn matches a full sort oracle") {
    Rng rng(17);
    const auto x = random_points(rng, 100, 4);
    const std::size_t k = 5;
    const auto nn = knn_graph(x, k);
    for (std::size_t i = 0; i < x.n; ++i) {
        std::vector<std::pair<double, std::uint32_t>> all;
        for (std::size_t j = 0; j < x.n; ++j) {
            if (j == i) continue;
            double d = 0;
            for (std::size_t c = 0; c < x.dim; ++c) d += std::pow(x.values[i * 4 + c] - x.values[j * 4 + c], 2);
            all.emplace_back(std::sqrt(d), static_cast<std::uint32_t>(j));
        }
        std::sort(all.begin(), all.end());
        for (std::size_t j = 0; j < k; ++j) {
            CHECK(nn.at(i, j) == all[j].second);
            CHECK(nn.dist(i, j) == doctest::Approx(all[j].first).epsilon(1e-12));
        }
    }
}

TEST_CASE("fuzzy weights calibrate sigma and symmetrize") {
    CHECK(symmetrize(1.0, 0.0) == 1.0);
    CHECK(symmetrize(0.5, 0.5) == 0.75);

    Rng rng(23);
    const auto x = random_points(rng, 60, 3);
    const std::size_t k = 8;
    const auto nn = knn_graph(x, k);
    const auto g = fuzzy_weights(nn);
    for (std::size_t i = 0; i < x.n; ++i) {
        CHECK(g.rho[i] == nn.dist(i, 0));
        double s = 0;
        for (std::size_t j = 0; j < k; ++j) s += std::exp(-std::max(0.0, nn.dist(i, j) - g.rho[i]) / g.sigma[i]);
        CHECK(s == doctest::Approx(std::log2(static_cast<double>(k))).epsilon(1e-5));
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        CHECK(g.edges[e].i < g.edges[e].j);
        CHECK(g.edges[e].weight > 0.0);
        CHECK(g.edges[e].weight <= 1.0);
        if (e > 0) {
            const auto& p = g.edges[e - 1];
            CHECK(std::make_pair(p.i, p.j) < std::make_pair(g.edges[e].i, g.edges[e].j));
        }
    }
    // Nearest-neighbour edges carry directed weight exp(0) = 1, so their
    // symmetrized weight is 1 too.
    for (std::size_t i = 0; i < x.n; ++i) {
        const auto j = nn.at(i, 0);
        const auto lo = std::min<std::uint32_t>(i, j), hi = std::max<std::uint32_t>(i, j);
        const auto it = std::find_if(g.edges.begin(), g.edges.end(), [&](const Edge& e) { return e.i == lo && e.j == hi; });
        REQUIRE(it != g.edges.end());
        CHECK(it->weight == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("curve fit") {
    const auto c = curve_params(0.1);
    CHECK(c.fitted);
    CHECK(c.a > 0);
    CHECK(c.b > 0);
    CHECK(low_dim_weight(0.1 * 0.1, c) == doctest::Approx(1.0).epsilon(0.05));
    double prev = 2.0;
    for (double d = 0.01; d <= 3.0; d += 0.01) {
        const double w = low_dim_weight(d * d, c);
        CHECK(w < prev);
        prev = w;
    }
    const CurveParams unit{};
    CHECK(low_dim_weight(4.0, unit) == 1.0 / 5.0);
    CHECK_THROWS_AS(curve_params(0.0), InputError);
}

TEST_CASE("cross entropy terms") {
    for (double w : {0.01, 0.3, 0.5, 0.99}) CHECK(std::fabs(cross_entropy_term(w, w)) < 1e-15);
    Rng rng(4);
    for (int t = 0; t < 1000; ++t) CHECK(cross_entropy_term(rng.uniform(), rng.uniform()) >= 0.0);
    CHECK(std::isfinite(cross_entropy_term(1.0, 0.0)));
    CHECK(std::isfinite(cross_entropy_term(0.0, 1.0)));
}

TEST_CASE("two points with one edge move together") {
    FuzzyGraph g;
    g.n = 2;
    g.k = 1;
    g.edges = {{0, 1, 1.0}};
    LayoutOptions opts;
    opts.out_dim = 2;
    opts.epochs = 10;
    opts.neg_samples = 0;
    opts.fixed_curve = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        opts.seed = seed;
        const auto layout = optimize_layout(g, opts);
        REQUIRE(layout.epoch_ce.size() == 10);
        // With a = b = 1 one step scales the gap by |1 - 4 alpha / (1 + d^2)|,
        // below one once the decayed rate reaches 0.5 at epoch 5. The recorded
        // CE is -log w_l, monotone in the gap.
        for (std::size_t e = 6; e < layout.epoch_ce.size(); ++e) CHECK(layout.epoch_ce[e] <= layout.epoch_ce[e - 1]);
        const double gap = std::hypot(layout.y[0] - layout.y[2], layout.y[1] - layout.y[3]);
        CHECK(gap < 1e-2);
    }
}

TEST_CASE("layout is deterministic and rejects bad options") {
    const auto b = fixtures::blobs(5, 8);
    ReduceOptions opts;
    opts.layout.epochs = 30;
    const auto a = reduce(to_points(b), opts);
    const auto c = reduce(to_points(b), opts);
    CHECK(a.y == c.y);
    CHECK(a.epoch_ce == c.epoch_ce);
    LayoutOptions bad;
    bad.out_dim = 1;
    CHECK_THROWS_AS(optimize_layout(FuzzyGraph{}, bad), InputError);
}

TEST_CASE("blob layout lowers CE and preserves neighbourhoods") {
    const auto b = fixtures::blobs(11, 10);
    const auto x = to_points(b);
    ReduceOptions opts;
    const auto layout = reduce(x, opts);
    const auto& ce = layout.epoch_ce;
    const double tail = std::accumulate(ce.end() - 10, ce.end(), 0.0) / 10.0;
    CHECK(tail < ce.front());
    CHECK(knn_preservation(x, layout.points(), 10, 15) >= 0.70);
    for (double v : layout.y) CHECK(std::isfinite(v));
}

}
