#include "topicforge/clusterer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/kernels.hpp"

namespace topicforge::clusterer {

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> label;  // dendrogram node id of each root
    std::vector<std::uint32_t> size;

    explicit UnionFind(std::size_t n) : parent(n), label(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), 0u);
        std::iota(label.begin(), label.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

}  // namespace

std::vector<double> core_distances(const Points& y, std::size_t min_pts) {
    if (min_pts < 1 || min_pts >= y.n)
        throw InputError("core_distances: min_pts must satisfy 1 <= min_pts < n (min_pts=" + std::to_string(min_pts) +
                         ", n=" + std::to_string(y.n) + ")");
    std::vector<double> core(y.n);
    std::vector<double> d(y.n - 1);
    for (std::size_t i = 0; i < y.n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < y.n; ++j)
            if (j != i) d[c++] = kernels::squared_distance(y.row(i), y.row(j));
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(min_pts - 1), d.end());
        core[i] = std::sqrt(d[min_pts - 1]);
    }
    return core;
}

MutualReachabilityGraph::MutualReachabilityGraph(Points points, std::vector<double> core, std::size_t min_pts)
    : points_(std::move(points)), core_(std::move(core)), min_pts_(min_pts) {
    if (core_.size() != points_.n) throw InputError("mutual_reachability: core distance count does not match points");
}

double MutualReachabilityGraph::raw_dist(std::size_t p, std::size_t q) const {
    if (p == q) return 0.0;
    return std::sqrt(kernels::squared_distance(points_.row(p), points_.row(q)));
}

double MutualReachabilityGraph::dist(std::size_t p, std::size_t q) const {
    if (p == q) return 0.0;
    return std::max({core_[p], core_[q], raw_dist(p, q)});
}

MutualReachabilityGraph mutual_reachability(const Points& y, std::vector<double> core, std::size_t min_pts) {
    return MutualReachabilityGraph(y, std::move(core), min_pts);
}

std::vector<MstEdge> minimum_spanning_tree(const MutualReachabilityGraph& g) {
    const std::size_t n = g.size();
    if (n < 2) throw InputError("minimum_spanning_tree: need at least 2 points");
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> from(n, 0);
    std::vector<char> in_tree(n, 0);
    std::vector<MstEdge> edges;
    edges.reserve(n - 1);

    std::uint32_t current = 0;
    in_tree[0] = 1;
    for (std::size_t step = 1; step < n; ++step) {
        std::uint32_t next = 0;
        double next_w = std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double w = g.dist(current, v);
            if (w < best[v]) {
                best[v] = w;
                from[v] = current;
            }
            if (!found || best[v] < next_w) {
                next_w = best[v];
                next = v;
                found = true;
            }
        }
        in_tree[next] = 1;
        edges.push_back({from[next], next, next_w});
        current = next;
    }
    return edges;
}

Dendrogram build_hierarchy(std::span<const MstEdge> mst, std::size_t n) {
    if (mst.size() + 1 != n) throw InputError("build_hierarchy: an MST over n points has n-1 edges");
    std::vector<MstEdge> sorted(mst.begin(), mst.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const MstEdge& x, const MstEdge& y) {
        if (x.weight != y.weight) return x.weight < y.weight;
        const auto xl = std::min(x.u, x.v), yl = std::min(y.u, y.v);
        if (xl != yl) return xl < yl;
        return std::max(x.u, x.v) < std::max(y.u, y.v);
    });
    UnionFind uf(n);
    Dendrogram d{n, {}};
    d.merges.reserve(n - 1);
    for (const auto& e : sorted) {
        const auto ru = uf.find(e.u), rv = uf.find(e.v);
        if (ru == rv) throw InputError("build_hierarchy: input edges contain a cycle");
        const auto new_id = static_cast<std::uint32_t>(n + d.merges.size());
        const auto merged = uf.size[ru] + uf.size[rv];
        d.merges.push_back({uf.label[ru], uf.label[rv], e.weight, merged});
        uf.parent[rv] = ru;
        uf.size[ru] = merged;
        uf.label[ru] = new_id;
    }
    return d;
}

CondensedTree condense(const Dendrogram& dendrogram, std::size_t min_cluster_size) {
    const std::size_t n = dendrogram.n;
    if (min_cluster_size < 2) throw InputError("condense: min_cluster_size must be >= 2");
    if (min_cluster_size > n) throw InputError("condense: min_cluster_size exceeds the number of points");

    CondensedTree tree;
    tree.n = n;
    tree.min_cluster_size = min_cluster_size;

    double max_finite = 0.0;
    for (const auto& m : dendrogram.merges)
        if (m.weight > 0.0) max_finite = std::max(max_finite, 1.0 / m.weight);
    if (max_finite == 0.0) max_finite = 1.0;
    auto lambda_of = [&](double w) { return w > 0.0 ? 1.0 / w : max_finite; };

    auto node_size = [&](std::uint32_t node) -> std::uint32_t {
        return node < n ? 1u : dendrogram.merges[node - n].size;
    };
    auto leaves = [&](std::uint32_t node) {
        std::vector<std::uint32_t> out, stack{node};
        while (!stack.empty()) {
            auto x = stack.back();
            stack.pop_back();
            if (x < n) out.push_back(x);
            else {
                stack.push_back(dendrogram.merges[x - n].b);
                stack.push_back(dendrogram.merges[x - n].a);
            }
        }
        return out;
    };

    tree.clusters.push_back({static_cast<std::uint32_t>(n), -1, 0.0, 0.0, static_cast<std::uint32_t>(n), 0.0});
    if (n == 1) return tree;

    const auto root = static_cast<std::uint32_t>(2 * n - 2);
    std::vector<std::uint32_t> relabel(2 * n - 1, 0);
    relabel[root] = static_cast<std::uint32_t>(n);
    auto new_cluster = [&](std::uint32_t parent, std::uint32_t size, double lambda) {
        const auto id = static_cast<std::uint32_t>(n + tree.clusters.size());
        tree.clusters.push_back({id, static_cast<std::int64_t>(parent), lambda, lambda, size, 0.0});
        return id;
    };
    auto points_fall_out = [&](std::uint32_t parent, std::uint32_t node, double lambda) {
        for (auto p : leaves(node)) tree.rows.push_back({parent, p, lambda, 1});
    };

    std::deque<std::uint32_t> queue{root};
    while (!queue.empty()) {
        const auto node = queue.front();
        queue.pop_front();
        if (node < n) continue;
        const auto& m = dendrogram.merges[node - n];
        const double lambda = lambda_of(m.weight);
        const auto parent = relabel[node];
        const auto ls = node_size(m.a), rs = node_size(m.b);
        const bool big_l = ls >= min_cluster_size, big_r = rs >= min_cluster_size;
        if (big_l && big_r) {
            for (auto [child, size] : {std::pair{m.a, ls}, std::pair{m.b, rs}}) {
                const auto id = new_cluster(parent, size, lambda);
                tree.rows.push_back({parent, id, lambda, size});
                relabel[child] = id;
                queue.push_back(child);
            }
        } else if (!big_l && !big_r) {
            points_fall_out(parent, m.a, lambda);
            points_fall_out(parent, m.b, lambda);
        } else {
            const auto keep = big_l ? m.a : m.b;
            const auto drop = big_l ? m.b : m.a;
            points_fall_out(parent, drop, lambda);
            relabel[keep] = parent;
            queue.push_back(keep);
        }
    }

    for (const auto& r : tree.rows) {
        auto& c = tree.clusters[r.parent - n];
        c.stability += (r.lambda - c.lambda_birth) * r.child_size;
        c.lambda_death = std::max(c.lambda_death, r.lambda);
    }
    return tree;
}

ClusterLabels extract_clusters(const CondensedTree& tree) {
    const std::size_t n = tree.n;
    const std::size_t m = tree.clusters.size();
    std::vector<std::vector<std::uint32_t>> children(m);
    for (const auto& c : tree.clusters)
        if (c.parent >= 0) children[static_cast<std::size_t>(c.parent) - n].push_back(c.id);

    std::vector<double> stability(m);
    std::vector<char> selected(m, 0);
    for (std::size_t i = 0; i < m; ++i) stability[i] = tree.clusters[i].stability;

    auto deselect_subtree = [&](std::size_t idx) {
        std::vector<std::size_t> stack;
        for (auto c : children[idx]) stack.push_back(c - n);
        while (!stack.empty()) {
            auto x = stack.back();
            stack.pop_back();
            selected[x] = 0;
            for (auto c : children[x]) stack.push_back(c - n);
        }
    };

    // children always carry larger ids than their parent
    for (std::size_t idx = m; idx-- > 1;) {
        double child_sum = 0.0;
        for (auto c : children[idx]) child_sum += stability[c - n];
        if (!children[idx].empty() && child_sum > stability[idx]) {
            selected[idx] = 0;
            stability[idx] = child_sum;
        } else {
            selected[idx] = 1;
            deselect_subtree(idx);
        }
    }
    if (m == 1) selected[0] = 1;

    ClusterLabels out;
    std::vector<int> label_of(m, -1);
    for (std::size_t idx = 0; idx < m; ++idx) {
        if (!selected[idx]) continue;
        label_of[idx] = out.n_clusters++;
        out.selected.push_back(tree.clusters[idx].id);
    }

    out.labels.assign(n, -1);
    for (const auto& r : tree.rows) {
        if (r.child >= n) continue;
        std::int64_t c = r.parent;
        while (c >= 0) {
            const auto idx = static_cast<std::size_t>(c) - n;
            if (selected[idx]) {
                out.labels[r.child] = label_of[idx];
                break;
            }
            c = tree.clusters[idx].parent;
        }
    }
    return out;
}

ClusterResult cluster(const Points& y, const ClusterOptions& opts) {
    if (y.n < 2) throw InputError("cluster: need at least 2 points");
    const std::size_t min_pts = std::min(opts.min_pts, y.n - 1);
    auto g = mutual_reachability(y, core_distances(y, min_pts), min_pts);
    auto mst = minimum_spanning_tree(g);
    auto dendro = build_hierarchy(mst, y.n);
    ClusterResult r;
    r.tree = condense(dendro, std::min(opts.min_cluster_size, y.n));
    r.labels = extract_clusters(r.tree);
    return r;
}

std::string CondensedTree::to_csv() const {
    std::string out = "parent,child,lambda,child_size\n";
    for (const auto& r : rows)
        out += std::to_string(r.parent) + "," + std::to_string(r.child) + "," + csv::format_double(r.lambda) + "," +
               std::to_string(r.child_size) + "\n";
    return out;
}

std::string labels_csv(const ClusterLabels& labels, std::span<const std::string> doc_ids) {
    std::string out = "doc_id,label\n";
    for (std::size_t i = 0; i < labels.labels.size(); ++i)
        out += csv::quote(i < doc_ids.size() ? doc_ids[i] : std::to_string(i)) + "," + std::to_string(labels.labels[i]) +
               "\n";
    return out;
}

}  // namespace topicforge::clusterer
