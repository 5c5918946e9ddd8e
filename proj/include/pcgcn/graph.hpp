#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pcgcn {

constexpr std::int32_t kUnlabeled = -1;
constexpr std::int32_t kUnreachable = -1;

/// Undirected graph in CSR form. Symmetric, rows sorted, deduplicated,
/// no self-loops stored. Immutable after construction.
struct Graph {
    std::int32_t num_nodes = 0;
    std::vector<std::int32_t> row_offsets; // length num_nodes+1
    std::vector<std::int32_t> col_indices;

    std::int32_t degree(std::int32_t i) const {
        return row_offsets[i + 1] - row_offsets[i];
    }
    std::span<const std::int32_t> neighbors(std::int32_t i) const {
        return {col_indices.data() + row_offsets[i],
                static_cast<std::size_t>(degree(i))};
    }
    bool has_edge(std::int32_t u, std::int32_t v) const;
    /// Each undirected edge counted once.
    std::int64_t num_edges() const {
        return static_cast<std::int64_t>(col_indices.size()) / 2;
    }
};

/// Â = D̃^{-1/2} (A+I) D̃^{-1/2} in CSR: same pattern as the graph plus the
/// diagonal, entry (i,j) = 1/sqrt((d_i+1)(d_j+1)).
struct NormalizedAdjacency {
    std::int32_t num_nodes = 0;
    std::vector<std::int32_t> row_offsets;
    std::vector<std::int32_t> col_indices;
    std::vector<double> values;
};

/// Class id per node, kUnlabeled (-1) where unknown.
struct LabelSet {
    std::vector<std::int32_t> labels;
    std::int32_t num_classes = 0;
};

struct HomophilyReport {
    double edge_ratio = 0.0;       // intra-class fraction over eligible edges
    std::vector<double> node_ratios; // per node; 0 where excluded
    std::vector<std::int32_t> excluded_nodes; // degree 0, unlabeled, or no labeled neighbor
    double graph_mean = 0.0;       // mean of node_ratios over non-excluded nodes
};

/// Symmetrize, deduplicate, sort. Self-loops in the input are dropped
/// (normalization re-adds exactly one); strict=true rejects them instead.
/// dropped_self_loops, when given, receives the number of loop entries seen.
/// Throws DataError on out-of-range ids or (strict) self-loops.
Graph build_graph(std::span<const std::pair<std::int32_t, std::int32_t>> edge_list,
                  std::int32_t num_nodes, bool strict = false,
                  std::int64_t* dropped_self_loops = nullptr);

NormalizedAdjacency normalize_adjacency(const Graph& g);

/// Fraction of undirected edges whose endpoints share a label. Edges with an
/// unlabeled endpoint are excluded entirely. Throws DataError when no edge
/// is eligible.
double edge_homophily(const Graph& g, const LabelSet& ls);

/// Per-node same-label neighbor fraction and its mean, neighbors restricted
/// to labeled ones. Nodes that are unlabeled, isolated, or have no labeled
/// neighbor are excluded from the mean. Throws DataError if every node is
/// excluded.
HomophilyReport node_homophily(const Graph& g, const LabelSet& ls);

/// For each node with a ground-truth label, the shortest-path distance to
/// the nearest train-masked node of the same class (0 for such a node
/// itself). kUnreachable where no such node can be reached or the node is
/// unlabeled. One multi-source BFS per class.
std::vector<std::int32_t> shortest_label_distance(const Graph& g, const LabelSet& ls,
                                                  const std::vector<bool>& train_mask);

} // namespace pcgcn
