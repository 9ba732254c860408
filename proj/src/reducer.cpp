#include "topicforge/reducer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/common/rng.hpp"
#include "topicforge/kernels.hpp"

namespace topicforge::reducer {

namespace {

constexpr double w_low_floor = 1e-4;
constexpr double w_low_ceil = 1.0 - 1e-4;
constexpr double gradient_clip = 4.0;
constexpr double divergence_limit = 1e6;

double clip(double g) { return std::clamp(g, -gradient_clip, gradient_clip); }

std::vector<std::vector<std::uint32_t>> neighbor_sets(const Points& x, std::size_t k) {
    auto nn = knn_graph(x, k);
    std::vector<std::vector<std::uint32_t>> out(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        out[i].assign(nn.index.begin() + static_cast<std::ptrdiff_t>(i * k),
                      nn.index.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
        std::sort(out[i].begin(), out[i].end());
    }
    return out;
}

}  // namespace

Neighbors knn_graph(const Points& x, std::size_t k) {
    if (k < 1 || k >= x.n)
        throw InputError("knn_graph: k must satisfy 1 <= k < n (k=" + std::to_string(k) + ", n=" +
                         std::to_string(x.n) + ")");
    Neighbors out{x.n, k, std::vector<std::uint32_t>(x.n * k), std::vector<double>(x.n * k)};
    std::vector<std::pair<double, std::uint32_t>> cand(x.n - 1);
    for (std::size_t i = 0; i < x.n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < x.n; ++j) {
            if (j == i) continue;
            cand[c++] = {kernels::squared_distance(x.row(i), x.row(j)), static_cast<std::uint32_t>(j)};
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t j = 0; j < k; ++j) {
            out.index[i * k + j] = cand[j].second;
            out.distance[i * k + j] = std::sqrt(cand[j].first);
        }
    }
    return out;
}

FuzzyGraph fuzzy_weights(const Neighbors& knn) {
    if (knn.k < 2) throw InputError("fuzzy_weights: need k >= 2 neighbours");
    FuzzyGraph g;
    g.n = knn.n;
    g.k = knn.k;
    g.rho.resize(knn.n);
    g.sigma.resize(knn.n);
    const double target = std::log2(static_cast<double>(knn.k));

    double mean_dist = 0.0;
    for (double d : knn.distance) mean_dist += d;
    mean_dist /= static_cast<double>(knn.distance.size());

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, double>> directed;
    for (std::size_t i = 0; i < knn.n; ++i) {
        const double rho = knn.dist(i, 0);
        auto mass = [&](double sigma) {
            double s = 0.0;
            for (std::size_t j = 0; j < knn.k; ++j) s += std::exp(-std::max(0.0, knn.dist(i, j) - rho) / sigma);
            return s;
        };

        // smallest reachable mass: only the neighbours sitting exactly at rho
        std::size_t at_rho = 0;
        for (std::size_t j = 0; j < knn.k; ++j) at_rho += knn.dist(i, j) - rho <= 0.0;

        double sigma;
        if (static_cast<double>(at_rho) >= target) {
            sigma = 1e-3 * (mean_dist > 0 ? mean_dist : 1.0);
        } else {
            double lo = 0.0, hi = 1.0;
            int expand = 0;
            while (mass(hi) < target) {
                lo = hi;
                hi *= 2.0;
                if (++expand > 2000) throw NumericError("fuzzy_weights: cannot bracket sigma for vertex " + std::to_string(i));
            }
            double mid = 0.5 * (lo + hi);
            double f = mass(mid);
            for (int it = 0; it < 64 && std::fabs(f - target) >= 1e-5; ++it) {
                if (f > target) hi = mid;
                else lo = mid;
                mid = 0.5 * (lo + hi);
                f = mass(mid);
            }
            if (std::fabs(f - target) >= 1e-5)
                throw NumericError("fuzzy_weights: sigma bisection did not converge for vertex " + std::to_string(i));
            sigma = mid;
        }
        g.rho[i] = rho;
        g.sigma[i] = sigma;

        for (std::size_t j = 0; j < knn.k; ++j) {
            const auto nb = knn.at(i, j);
            const double w = std::exp(-std::max(0.0, knn.dist(i, j) - rho) / sigma);
            const auto a = static_cast<std::uint32_t>(i);
            auto& slot = directed[{std::min(a, nb), std::max(a, nb)}];
            if (a < nb) slot.first = w;
            else slot.second = w;
        }
    }
    g.edges.reserve(directed.size());
    for (const auto& [key, w] : directed) {
        const double s = symmetrize(w.first, w.second);
        if (s > 0.0) g.edges.push_back({key.first, key.second, std::min(1.0, s)});
    }
    return g;
}

CurveParams curve_params(double min_dist) {
    if (!(min_dist > 0.0 && min_dist < 2.0)) throw InputError("curve_params: min_dist must be in (0, 2)");
    constexpr int samples = 300;
    std::vector<double> xs(samples), ys(samples);
    for (int s = 0; s < samples; ++s) {
        xs[s] = 3.0 * (s + 1) / samples;
        ys[s] = xs[s] <= min_dist ? 1.0 : std::exp(-(xs[s] - min_dist));
    }
    auto residuals = [&](double a, double b, std::vector<double>& r) {
        double sse = 0;
        for (int s = 0; s < samples; ++s) {
            r[s] = 1.0 / (1.0 + a * std::pow(xs[s], 2.0 * b)) - ys[s];
            sse += r[s] * r[s];
        }
        return sse;
    };

    // Levenberg-Marquardt over (a, b)
    double a = 1.0, b = 1.0, lambda = 1e-3;
    std::vector<double> r(samples), r_try(samples);
    double sse = residuals(a, b, r);
    for (int iter = 0; iter < 500; ++iter) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (int s = 0; s < samples; ++s) {
            const double p = std::pow(xs[s], 2.0 * b);
            const double den = 1.0 + a * p;
            const double da = -p / (den * den);
            const double db = -a * p * 2.0 * std::log(xs[s]) / (den * den);
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            jtr0 += da * r[s];
            jtr1 += db * r[s];
        }
        bool improved = false;
        for (int tries = 0; tries < 30 && !improved; ++tries) {
            const double m00 = jtj00 * (1 + lambda), m11 = jtj11 * (1 + lambda);
            const double det = m00 * m11 - jtj01 * jtj01;
            if (det == 0.0) break;
            const double step_a = -(m11 * jtr0 - jtj01 * jtr1) / det;
            const double step_b = -(m00 * jtr1 - jtj01 * jtr0) / det;
            const double na = a + step_a, nb = b + step_b;
            if (na > 0 && nb > 0) {
                const double nsse = residuals(na, nb, r_try);
                if (nsse < sse) {
                    const double gain = sse - nsse;
                    a = na;
                    b = nb;
                    sse = nsse;
                    r.swap(r_try);
                    lambda = std::max(1e-12, lambda * 0.3);
                    improved = true;
                    if (gain < 1e-15) iter = 500;
                    break;
                }
            }
            lambda *= 10;
        }
        if (!improved) break;
    }
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0 || b <= 0) return {};
    return {a, b, true};
}

double cross_entropy_term(double w_high, double w_low) {
    const double wl = std::clamp(w_low, w_low_floor, w_low_ceil);
    double ce = 0.0;
    if (w_high > 0.0) ce += w_high * std::log(w_high / wl);
    if (w_high < 1.0) ce += (1.0 - w_high) * std::log((1.0 - w_high) / (1.0 - wl));
    return ce;
}

Layout optimize_layout(const FuzzyGraph& graph, const LayoutOptions& opts) {
    if (opts.out_dim < 2) throw InputError("optimize_layout: out_dim must be >= 2");
    if (opts.epochs < 1) throw InputError("optimize_layout: epochs must be >= 1");
    const CurveParams curve = opts.fixed_curve ? CurveParams{} : curve_params(opts.min_dist);
    const std::size_t n = graph.n, dim = opts.out_dim;

    Rng rng(opts.seed);
    Layout out;
    out.n = n;
    out.out_dim = dim;
    out.y.resize(n * dim);
    for (auto& v : out.y) v = 1e-2 * rng.normal();
    out.epoch_ce.reserve(opts.epochs);

    std::vector<double> diff(dim);
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        const double alpha =
            opts.learning_rate * (1.0 - static_cast<double>(epoch) / static_cast<double>(opts.epochs));
        double ce = 0.0;
        for (const auto& e : graph.edges) {
            double* yi = &out.y[e.i * dim];
            double* yj = &out.y[e.j * dim];
            const double d2 = kernels::squared_distance({yi, dim}, {yj, dim});
            ce += cross_entropy_term(e.weight, 1.0 / (1.0 + curve.a * std::pow(d2, curve.b)));
            if (d2 > 0.0) {
                const double coeff = -2.0 * curve.a * curve.b * std::pow(d2, curve.b - 1.0) /
                                     (1.0 + curve.a * std::pow(d2, curve.b));
                for (std::size_t d = 0; d < dim; ++d) {
                    const double g = clip(coeff * (yi[d] - yj[d])) * e.weight * alpha;
                    yi[d] += g;
                    yj[d] -= g;
                }
            }
            for (std::size_t s = 0; s < opts.neg_samples; ++s) {
                const std::size_t k = rng.below(n);
                if (k == e.i) continue;
                double* yk = &out.y[k * dim];
                const double nd2 = kernels::squared_distance({yi, dim}, {yk, dim});
                ce += cross_entropy_term(0.0, 1.0 / (1.0 + curve.a * std::pow(nd2, curve.b)));
                const double coeff = 2.0 * curve.b / ((1e-3 + nd2) * (1.0 + curve.a * std::pow(nd2, curve.b)));
                for (std::size_t d = 0; d < dim; ++d) {
                    const double g = nd2 > 0.0 ? clip(coeff * (yi[d] - yk[d])) : gradient_clip;
                    yi[d] += g * e.weight * alpha;
                }
            }
        }
        for (std::size_t i = 0; i < out.y.size(); ++i) {
            if (!std::isfinite(out.y[i]) || std::fabs(out.y[i]) > divergence_limit)
                throw NumericError("optimize_layout: diverged at epoch " + std::to_string(epoch + 1) + ", point " +
                                   std::to_string(i / dim) + " coordinate " + csv::format_double(out.y[i]));
        }
        out.epoch_ce.push_back(ce);
    }
    return out;
}

Layout reduce(const Points& x, const ReduceOptions& opts) {
    const std::size_t k = std::min(opts.k, x.n - 1);
    return optimize_layout(fuzzy_weights(knn_graph(x, k)), opts.layout);
}

double knn_preservation(const Points& high, const Points& low, std::size_t k_high, std::size_t k_low) {
    if (high.n != low.n) throw InputError("knn_preservation: point counts differ");
    auto hs = neighbor_sets(high, k_high);
    auto ls = neighbor_sets(low, k_low);
    double total = 0.0;
    for (std::size_t i = 0; i < high.n; ++i) {
        std::vector<std::uint32_t> common;
        std::set_intersection(hs[i].begin(), hs[i].end(), ls[i].begin(), ls[i].end(), std::back_inserter(common));
        total += static_cast<double>(common.size()) / static_cast<double>(k_high);
    }
    return total / static_cast<double>(high.n);
}

std::string layout_csv(const Layout& layout, std::span<const std::string> doc_ids) {
    std::string out = "doc_id";
    for (std::size_t d = 0; d < layout.out_dim; ++d) out += ",y" + std::to_string(d + 1);
    out += "\n";
    for (std::size_t i = 0; i < layout.n; ++i) {
        out += csv::quote(i < doc_ids.size() ? doc_ids[i] : std::to_string(i));
        for (std::size_t d = 0; d < layout.out_dim; ++d) out += "," + csv::format_double(layout.y[i * layout.out_dim + d]);
        out += "\n";
    }
    return out;
}

}  // namespace topicforge::reducer
