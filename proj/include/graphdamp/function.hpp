#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "graphdamp/mesh.hpp"

namespace graphdamp {

/// Continuous piecewise-linear function on the extended tree: nodal values
/// per edge plus prehistory samples on [-tau, 0] for edge 1. prehistory
/// ends at the same point edge 1 starts, so prehistory.back() == values[1][0]
/// for a consistent function.
struct TreeFunction {
    std::vector<std::vector<double>> values; // 1-based edge, node 0..N_j
    std::vector<double> prehistory;          // node 0..n_tau, t = -tau + p*h

    static TreeFunction zeros(const Mesh& mesh) {
        TreeFunction f;
        f.values.resize(mesh.tree.m + 1);
        for (int j = 1; j <= mesh.tree.m; ++j)
            f.values[j].assign(mesh.num_elems[j] + 1, 0.0);
        f.prehistory.assign(mesh.n_tau + 1, 0.0);
        return f;
    }

    bool matches(const Mesh& mesh) const {
        if (static_cast<int>(values.size()) != mesh.tree.m + 1) return false;
        for (int j = 1; j <= mesh.tree.m; ++j)
            if (static_cast<std::int64_t>(values[j].size()) != mesh.num_elems[j] + 1) return false;
        return static_cast<std::int64_t>(prehistory.size()) == mesh.n_tau + 1;
    }
};

/// Element-wise linear function, discontinuous at nodes; element p of edge j
/// covers [p*h, (p+1)*h] with values (left, right) at its endpoints.
struct BrokenLinear {
    struct Elem {
        double left = 0.0;
        double right = 0.0;
    };
    std::vector<std::vector<Elem>> elems; // 1-based edge, element 0..N_j-1

    static BrokenLinear zeros(const Mesh& mesh) {
        BrokenLinear w;
        w.elems.resize(mesh.tree.m + 1);
        for (int j = 1; j <= mesh.tree.m; ++j)
            w.elems[j].assign(mesh.num_elems[j], Elem{});
        return w;
    }

    bool matches(const Mesh& mesh) const {
        if (static_cast<int>(elems.size()) != mesh.tree.m + 1) return false;
        for (int j = 1; j <= mesh.tree.m; ++j)
            if (static_cast<std::int64_t>(elems[j].size()) != mesh.num_elems[j]) return false;
        return true;
    }
};

inline void require_matches(const Mesh& mesh, const TreeFunction& f) {
    if (!f.matches(mesh)) throw validation_error("tree function does not match the mesh");
}

inline void require_matches(const Mesh& mesh, const BrokenLinear& w) {
    if (!w.matches(mesh)) throw validation_error("broken-linear function does not match the mesh");
}

/// Free-dof values of a mesh-conforming function.
inline std::vector<double> gather(const Mesh& mesh, const TreeFunction& f) {
    require_matches(mesh, f);
    std::vector<double> x(mesh.n_free, 0.0);
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t i = 0; i <= mesh.num_elems[j]; ++i)
            if (mesh.dof[j][i] >= 0) x[mesh.dof[j][i]] = f.values[j][i];
    return x;
}

/// Expand free-dof values into a tree function with zero prehistory and
/// zeros at every fixed node.
inline TreeFunction scatter(const Mesh& mesh, const std::vector<double>& x) {
    if (static_cast<std::int64_t>(x.size()) != mesh.n_free)
        throw validation_error("free vector does not match the mesh");
    TreeFunction f = TreeFunction::zeros(mesh);
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t i = 0; i <= mesh.num_elems[j]; ++i)
            if (mesh.dof[j][i] >= 0) f.values[j][i] = x[mesh.dof[j][i]];
    return f;
}

inline void scatter_add(const Mesh& mesh, const std::vector<double>& x, TreeFunction& f) {
    if (static_cast<std::int64_t>(x.size()) != mesh.n_free)
        throw validation_error("free vector does not match the mesh");
    require_matches(mesh, f);
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t i = 0; i <= mesh.num_elems[j]; ++i)
            if (mesh.dof[j][i] >= 0) f.values[j][i] += x[mesh.dof[j][i]];
}

} // namespace graphdamp
