#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topicforge/reducer.hpp"

namespace topicforge::clusterer {

using reducer::Points;

/// Distance from each point to its `min_pts`-th nearest neighbour (self excluded).
std::vector<double> core_distances(const Points& y, std::size_t min_pts);

/// max(core(p), core(q), d(p, q)), evaluated on demand.
class MutualReachabilityGraph {
public:
    MutualReachabilityGraph(Points points, std::vector<double> core, std::size_t min_pts);

    std::size_t size() const { return points_.n; }
    std::size_t min_pts() const { return min_pts_; }
    double core_dist(std::size_t p) const { return core_[p]; }
    double dist(std::size_t p, std::size_t q) const;
    double raw_dist(std::size_t p, std::size_t q) const;

private:
    Points points_;
    std::vector<double> core_;
    std::size_t min_pts_;
};

MutualReachabilityGraph mutual_reachability(const Points& y, std::vector<double> core, std::size_t min_pts = 0);

struct MstEdge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    double weight = 0.0;
};

/// Prim's algorithm on the dense graph, starting at vertex 0; ties go to the
/// lower vertex id.
std::vector<MstEdge> minimum_spanning_tree(const MutualReachabilityGraph& g);

struct Merge {
    std::uint32_t a = 0;  // node ids: < n are points, n + m is the m-th merge
    std::uint32_t b = 0;
    double weight = 0.0;
    std::uint32_t size = 0;
};

struct Dendrogram {
    std::size_t n = 0;
    std::vector<Merge> merges;  // ascending weight
};

Dendrogram build_hierarchy(std::span<const MstEdge> mst, std::size_t n);

/// One edge of the condensed tree: `child` is a point (< n) or a cluster
/// node (>= n). Root cluster id is n.
struct CondensedRow {
    std::uint32_t parent = 0;
    std::uint32_t child = 0;
    double lambda = 0.0;
    std::uint32_t child_size = 0;
};

struct ClusterNode {
    std::uint32_t id = 0;
    std::int64_t parent = -1;  // -1 for the root
    double lambda_birth = 0.0;
    double lambda_death = 0.0;
    std::uint32_t size = 0;
    double stability = 0.0;
};

struct CondensedTree {
    std::size_t n = 0;
    std::size_t min_cluster_size = 0;
    std::vector<CondensedRow> rows;
    std::vector<ClusterNode> clusters;  // index = id - n

    const ClusterNode& cluster(std::uint32_t id) const { return clusters[id - n]; }
    std::string to_csv() const;
};

/// Lambda = 1 / merge weight. Zero-weight merges (duplicate points) get the
/// largest finite lambda in the tree so stabilities stay finite.
CondensedTree condense(const Dendrogram& dendrogram, std::size_t min_cluster_size);

struct ClusterLabels {
    std::vector<int> labels;  // -1 = outlier
    int n_clusters = 0;
    std::vector<std::uint32_t> selected;  // condensed-tree ids, in label order
};

/// Excess-of-mass selection. The root is only chosen when the tree has no
/// other cluster node, so a single dense blob comes back as one cluster.
ClusterLabels extract_clusters(const CondensedTree& tree);

struct ClusterOptions {
    std::size_t min_pts = 10;
    std::size_t min_cluster_size = 10;
};

struct ClusterResult {
    ClusterLabels labels;
    CondensedTree tree;
};

ClusterResult cluster(const Points& y, const ClusterOptions& opts);

std::string labels_csv(const ClusterLabels& labels, std::span<const std::string> doc_ids);

}  // namespace topicforge::clusterer
