#include "pcgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "pcgcn/errors.hpp"

namespace pcgcn {

bool Graph::has_edge(std::int32_t u, std::int32_t v) const {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

Graph build_graph(std::span<const std::pair<std::int32_t, std::int32_t>> edge_list,
                  std::int32_t num_nodes, bool strict,
                  std::int64_t* dropped_self_loops) {
    if (num_nodes < 0) throw DataError("build_graph: negative node count");
    std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(num_nodes));
    std::int64_t loops = 0;
    for (const auto& [u, v] : edge_list) {
        if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
            throw DataError("build_graph: edge (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") out of range for " +
                            std::to_string(num_nodes) + " nodes");
        }
        if (u == v) {
            if (strict) {
                throw DataError("build_graph: self-loop at node " + std::to_string(u));
            }
            ++loops;
            continue;
        }
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    if (dropped_self_loops) *dropped_self_loops = loops;

    Graph g;
    g.num_nodes = num_nodes;
    g.row_offsets.resize(static_cast<std::size_t>(num_nodes) + 1, 0);
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    for (std::int32_t i = 0; i < num_nodes; ++i) {
        g.row_offsets[static_cast<std::size_t>(i) + 1] =
            g.row_offsets[static_cast<std::size_t>(i)] +
            static_cast<std::int32_t>(adj[static_cast<std::size_t>(i)].size());
    }
    g.col_indices.reserve(static_cast<std::size_t>(g.row_offsets.back()));
    for (auto& row : adj) g.col_indices.insert(g.col_indices.end(), row.begin(), row.end());
    return g;
}

NormalizedAdjacency normalize_adjacency(const Graph& g) {
    const std::int32_t n = g.num_nodes;
    // One sqrt of the degree product per entry, not a product of per-node
    // inverse roots: keeps (i,j) == (j,i) exact and simple cases like
    // 1/sqrt(2*2) landing on 0.5 without rounding.
    const auto entry = [&g](std::int32_t i, std::int32_t j) {
        return 1.0 / std::sqrt(double(g.degree(i) + 1) * double(g.degree(j) + 1));
    };

    NormalizedAdjacency a;
    a.num_nodes = n;
    a.row_offsets.resize(static_cast<std::size_t>(n) + 1, 0);
    a.col_indices.reserve(g.col_indices.size() + static_cast<std::size_t>(n));
    a.values.reserve(g.col_indices.size() + static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        bool placed_diag = false;
        for (const std::int32_t j : g.neighbors(i)) {
            if (!placed_diag && j > i) {
                a.col_indices.push_back(i);
                a.values.push_back(entry(i, i));
                placed_diag = true;
            }
            a.col_indices.push_back(j);
            a.values.push_back(entry(i, j));
        }
        if (!placed_diag) {
            a.col_indices.push_back(i);
            a.values.push_back(entry(i, i));
        }
        a.row_offsets[static_cast<std::size_t>(i) + 1] =
            static_cast<std::int32_t>(a.col_indices.size());
    }
    return a;
}

namespace {

void check_labels(const LabelSet& ls, std::int32_t num_nodes, const char* who) {
    if (static_cast<std::int32_t>(ls.labels.size()) != num_nodes) {
        throw DataError(std::string(who) + ": label count does not match node count");
    }
    if (ls.num_classes < 2) throw DataError(std::string(who) + ": need at least 2 classes");
    for (const std::int32_t y : ls.labels) {
        if (y != kUnlabeled && (y < 0 || y >= ls.num_classes)) {
            throw DataError(std::string(who) + ": label id out of range");
        }
    }
}

} // namespace

double edge_homophily(const Graph& g, const LabelSet& ls) {
    check_labels(ls, g.num_nodes, "edge_homophily");
    std::int64_t eligible = 0, intra = 0;
    for (std::int32_t i = 0; i < g.num_nodes; ++i) {
        const std::int32_t yi = ls.labels[static_cast<std::size_t>(i)];
        if (yi == kUnlabeled) continue;
        for (const std::int32_t j : g.neighbors(i)) {
            if (j <= i) continue; // count each undirected edge once
            const std::int32_t yj = ls.labels[static_cast<std::size_t>(j)];
            if (yj == kUnlabeled) continue;
            ++eligible;
            if (yi == yj) ++intra;
        }
    }
    if (eligible == 0) throw DataError("edge_homophily: no edge with both endpoints labeled");
    return double(intra) / double(eligible);
}

HomophilyReport node_homophily(const Graph& g, const LabelSet& ls) {
    check_labels(ls, g.num_nodes, "node_homophily");
    HomophilyReport rep;
    rep.node_ratios.assign(static_cast<std::size_t>(g.num_nodes), 0.0);
    rep.edge_ratio = 0.0;
    double sum = 0.0;
    std::int64_t counted = 0;
    for (std::int32_t i = 0; i < g.num_nodes; ++i) {
        const std::int32_t yi = ls.labels[static_cast<std::size_t>(i)];
        std::int64_t labeled = 0, same = 0;
        if (yi != kUnlabeled) {
            for (const std::int32_t j : g.neighbors(i)) {
                const std::int32_t yj = ls.labels[static_cast<std::size_t>(j)];
                if (yj == kUnlabeled) continue;
                ++labeled;
                if (yj == yi) ++same;
            }
        }
        if (yi == kUnlabeled || labeled == 0) {
            rep.excluded_nodes.push_back(i);
            continue;
        }
        const double r = double(same) / double(labeled);
        rep.node_ratios[static_cast<std::size_t>(i)] = r;
        sum += r;
        ++counted;
    }
    if (counted == 0) throw DataError("node_homophily: every node excluded");
    rep.graph_mean = sum / double(counted);

    // edge_ratio can fail independently (e.g. labeled nodes all isolated);
    // in that case leave it at 0 rather than discarding the node-level data.
    try {
        rep.edge_ratio = edge_homophily(g, ls);
    } catch (const DataError&) {
        rep.edge_ratio = 0.0;
    }
    return rep;
}

std::vector<std::int32_t> shortest_label_distance(const Graph& g, const LabelSet& ls,
                                                  const std::vector<bool>& train_mask) {
    check_labels(ls, g.num_nodes, "shortest_label_distance");
    if (static_cast<std::int32_t>(train_mask.size()) != g.num_nodes) {
        throw DataError("shortest_label_distance: mask size does not match node count");
    }
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    std::vector<std::int32_t> sld(n, kUnreachable);
    std::vector<std::int32_t> dist(n);
    std::deque<std::int32_t> queue;
    for (std::int32_t c = 0; c < ls.num_classes; ++c) {
        std::fill(dist.begin(), dist.end(), kUnreachable);
        queue.clear();
        for (std::int32_t i = 0; i < g.num_nodes; ++i) {
            if (train_mask[static_cast<std::size_t>(i)] &&
                ls.labels[static_cast<std::size_t>(i)] == c) {
                dist[static_cast<std::size_t>(i)] = 0;
                queue.push_back(i);
            }
        }
        while (!queue.empty()) {
            const std::int32_t u = queue.front();
            queue.pop_front();
            for (const std::int32_t v : g.neighbors(u)) {
                if (dist[static_cast<std::size_t>(v)] == kUnreachable) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (ls.labels[i] == c) sld[i] = dist[i];
        }
    }
    return sld;
}

} // namespace pcgcn
