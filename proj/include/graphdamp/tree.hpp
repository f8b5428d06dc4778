#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "graphdamp/errors.hpp"

namespace graphdamp {

/// Compact rooted metric tree.
///
/// Edges carry 1-based indices; edge j runs from vertex k_j to vertex j,
/// the root is vertex 0 and edge 1 is the single edge leaving it. After
/// construction the numbering is canonical: vertices 1..d are internal
/// (have child edges), vertices 0 and d+1..m are boundary. Edge lengths
/// are integer multiples of a unit kept outside this type, so all metric
/// bookkeeping stays exact.
struct RootedTree {
    int m = 0; // edge count
    int d = 0; // internal vertex count

    // 1-based; slot 0 unused. parent_vertex[j] = k_j, length_units[j] = T_j in units.
    std::vector<int> parent_vertex;
    std::vector<std::int64_t> length_units;

    // canonical edge j came from position input_index[j] (1-based) of the input arrays
    std::vector<int> input_index;

    // child_edges[v] = edges emanating from vertex v, ascending; empty for v > d
    std::vector<std::vector<int>> child_edges;

    bool relabelled() const {
        for (int j = 1; j <= m; ++j)
            if (input_index[j] != j) return true;
        return false;
    }
};

enum class VertexKind { root, internal, boundary };

inline VertexKind vertex_kind(const RootedTree& tree, int v) {
    if (v < 0 || v > tree.m) throw validation_error("vertex index out of range");
    if (v == 0) return VertexKind::root;
    return v <= tree.d ? VertexKind::internal : VertexKind::boundary;
}

/// Validate a parent/length description and bring it to canonical numbering.
///
/// parents[i] is the start vertex of input edge i+1, where vertex p >= 1 means
/// "terminal vertex of input edge p" and 0 means the root. Edges whose terminal
/// vertex has children are renumbered first so that internal vertices end up
/// as 1..d; input_index records the applied permutation.
inline RootedTree build_tree(const std::vector<int>& parents,
                             const std::vector<std::int64_t>& lengths) {
    const int m = static_cast<int>(parents.size());
    if (m == 0) throw validation_error("not a tree: no edges");
    if (lengths.size() != parents.size())
        throw validation_error("invalid length: need one length per edge");

    for (std::int64_t t : lengths)
        if (t <= 0) throw validation_error("invalid length: edge lengths must be positive");

    int root_edges = 0;
    for (int i = 0; i < m; ++i) {
        if (parents[i] < 0 || parents[i] > m)
            throw validation_error("not a tree: parent vertex out of range");
        if (parents[i] == 0) ++root_edges;
    }
    if (root_edges == 0) throw validation_error("not a tree: no edge leaves the root");
    if (root_edges > 1) throw validation_error("root must be a boundary vertex");

    // Walk j -> k_j; every edge must reach the root without revisiting anything.
    for (int j0 = 1; j0 <= m; ++j0) {
        int j = j0, steps = 0;
        while (j != 0) {
            j = parents[j - 1];
            if (++steps > m) throw validation_error("not a tree: cycle detected");
        }
    }

    std::vector<std::vector<int>> kids(m + 1); // input vertex -> input child edges
    for (int j = 1; j <= m; ++j) kids[parents[j - 1]].push_back(j);

    // BFS over input edges, then stable-partition: edges ending in an internal
    // vertex first. This both yields internal = {1..d} and k_j < j.
    std::vector<int> bfs;
    bfs.reserve(m);
    bfs.push_back(kids[0][0]);
    for (std::size_t q = 0; q < bfs.size(); ++q)
        for (int child : kids[bfs[q]]) bfs.push_back(child);
    if (static_cast<int>(bfs.size()) != m)
        throw validation_error("not a tree: disconnected edges");

    std::vector<int> order; // canonical position -> input edge
    order.reserve(m);
    for (int j : bfs)
        if (!kids[j].empty()) order.push_back(j);
    const int d = static_cast<int>(order.size());
    for (int j : bfs)
        if (kids[j].empty()) order.push_back(j);

    std::vector<int> canon(m + 1, 0); // input edge -> canonical index
    for (int c = 1; c <= m; ++c) canon[order[c - 1]] = c;

    RootedTree tree;
    tree.m = m;
    tree.d = d;
    tree.parent_vertex.assign(m + 1, 0);
    tree.length_units.assign(m + 1, 0);
    tree.input_index.assign(m + 1, 0);
    tree.child_edges.assign(m + 1, {});
    for (int c = 1; c <= m; ++c) {
        const int in = order[c - 1];
        const int kp = parents[in - 1];
        tree.parent_vertex[c] = kp == 0 ? 0 : canon[kp];
        tree.length_units[c] = lengths[in - 1];
        tree.input_index[c] = in;
        tree.child_edges[tree.parent_vertex[c]].push_back(c);
    }
    for (auto& v : tree.child_edges) std::sort(v.begin(), v.end());
    return tree;
}

/// Edges emanating from vertex j (the set V_j); defined for 0 <= j <= d.
inline const std::vector<int>& children(const RootedTree& tree, int j) {
    if (j < 0 || j > tree.d) throw validation_error("vertex index out of range");
    return tree.child_edges[j];
}

/// The chain of edges from vertex j back to the root, starting with edge j.
inline std::vector<int> path_to_root(const RootedTree& tree, int j) {
    if (j < 1 || j > tree.m) throw validation_error("edge index out of range");
    std::vector<int> path;
    while (j != 0) {
        path.push_back(j);
        j = tree.parent_vertex[j];
    }
    return path;
}

/// Longest root-to-leaf metric distance, in length units.
inline std::int64_t height_units(const RootedTree& tree) {
    std::int64_t best = 0;
    for (int j = 1; j <= tree.m; ++j) {
        std::int64_t sum = 0;
        for (int e : path_to_root(tree, j)) sum += tree.length_units[e];
        best = std::max(best, sum);
    }
    return best;
}

} // namespace graphdamp
