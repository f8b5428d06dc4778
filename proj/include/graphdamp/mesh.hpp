#pragma once

#include <cstdint>
#include <vector>

#include "graphdamp/tree.hpp"

namespace graphdamp {

/// Uniform grid on the extended tree, commensurate with the delay.
///
/// All edges share the step h = unit/refine; edge j carries num_elems[j]
/// elements (nodes 0..num_elems[j]), the delay spans exactly n_tau elements,
/// and edge 1 additionally carries n_tau prehistory elements on [-tau, 0].
/// dof[j][i] maps node i of edge j to a global free unknown (>= 0) or marks
/// it fixed to zero in the constrained test space:
///   * edge 1 node 0 is fixed (zero history for test functions),
///   * on boundary edges the nodes inside [T_j - tau, T_j] are fixed,
///   * an internal vertex is one shared free unknown for the parent edge's
///     last node and node 0 of every child edge.
struct Mesh {
    RootedTree tree;
    double unit = 1.0;
    int refine = 1;
    double h = 1.0;
    std::int64_t n_tau = 1;
    std::vector<std::int64_t> num_elems;         // 1-based, N_j
    std::vector<std::vector<std::int64_t>> dof;  // 1-based edge, node 0..N_j
    std::int64_t n_free = 0;

    static constexpr std::int64_t kFixedRoot = -1;
    static constexpr std::int64_t kFixedTarget = -2;

    bool boundary_edge(int j) const { return j > tree.d; }
    bool free_node(int j, std::int64_t i) const { return dof[j][i] >= 0; }

    std::int64_t total_nodes() const {
        std::int64_t n = 0;
        for (int j = 1; j <= tree.m; ++j) n += num_elems[j] + 1;
        return n;
    }
};

inline Mesh build_mesh(const RootedTree& tree, std::int64_t tau_units, double unit, int refine) {
    if (tau_units < 1) throw validation_error("delay must be a positive number of units");
    if (refine < 1) throw validation_error("refine must be at least 1");
    if (!(unit > 0.0)) throw validation_error("unit must be positive");

    Mesh mesh;
    mesh.tree = tree;
    mesh.unit = unit;
    mesh.refine = refine;
    mesh.h = unit / refine;
    mesh.n_tau = tau_units * static_cast<std::int64_t>(refine);

    mesh.num_elems.assign(tree.m + 1, 0);
    std::int64_t total = mesh.n_tau + 1;
    for (int j = 1; j <= tree.m; ++j) {
        if (tree.length_units[j] <= tau_units)
            throw validation_error("delay must be shorter than every edge");
        mesh.num_elems[j] = tree.length_units[j] * refine;
        total += mesh.num_elems[j] + 1;
        if (mesh.num_elems[j] > (std::int64_t{1} << 31) || total > 20'000'000)
            throw validation_error("mesh too fine");
    }

    mesh.dof.assign(tree.m + 1, {});
    std::int64_t next = 0;
    for (int j = 1; j <= tree.m; ++j) {
        const std::int64_t n = mesh.num_elems[j];
        auto& dj = mesh.dof[j];
        dj.assign(n + 1, 0);

        dj[0] = j == 1 ? Mesh::kFixedRoot : mesh.dof[tree.parent_vertex[j]].back();

        const std::int64_t last_free = mesh.boundary_edge(j) ? n - mesh.n_tau - 1 : n;
        for (std::int64_t i = 1; i <= n; ++i)
            dj[i] = i <= last_free ? next++ : Mesh::kFixedTarget;
    }
    mesh.n_free = next;
    return mesh;
}

inline Mesh build_mesh(const RootedTree& tree, std::int64_t tau_units, int refine) {
    return build_mesh(tree, tau_units, 1.0, refine);
}

} // namespace graphdamp
