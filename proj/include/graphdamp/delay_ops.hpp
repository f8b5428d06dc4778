#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "graphdamp/function.hpp"
#include "graphdamp/system.hpp"

namespace graphdamp {

/// Endpoint values of y(t - tau) on element p of edge j. The grid is aligned
/// with the delay, so the shifted element is again an element: of the same
/// edge for p >= n_tau, of the prehistory for the first elements of edge 1,
/// and of the parent edge's final tau-window otherwise.
inline std::pair<double, double> delayed_pair(const Mesh& mesh, const TreeFunction& y,
                                              int j, std::int64_t p) {
    const std::int64_t nt = mesh.n_tau;
    if (p >= nt) {
        const auto& v = y.values[j];
        return {v[p - nt], v[p - nt + 1]};
    }
    if (j == 1) return {y.prehistory[p], y.prehistory[p + 1]};
    const int parent = mesh.tree.parent_vertex[j];
    const auto& v = y.values[parent];
    const std::int64_t q = mesh.num_elems[parent] - nt + p;
    return {v[q], v[q + 1]};
}

/// First-order operator with global delay: on each element of edge j the
/// linear function y' + b_j*y + c_j*y(.-tau). Exact on piecewise-linear input.
inline BrokenLinear apply_ell(const DelaySystem& sys, const Mesh& mesh, const TreeFunction& y) {
    require_matches(mesh, y);
    BrokenLinear w = BrokenLinear::zeros(mesh);
    for (int j = 1; j <= mesh.tree.m; ++j) {
        const double bj = sys.b[j];
        const double cj = sys.c[j];
        const auto& v = y.values[j];
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            const double slope = (v[p + 1] - v[p]) / mesh.h;
            const auto [dl, dr] = delayed_pair(mesh, y, j, p);
            w.elems[j][p].left = slope + bj * v[p] + cj * dl;
            w.elems[j][p].right = slope + bj * v[p + 1] + cj * dr;
        }
    }
    return w;
}

/// Global-advance companion of apply_ell, acting on element-wise linear data:
///   (0, T_j - tau):      c_j * w_j(t + tau)
///   (T_j - tau, T_j):    sum over child edges nu of c_nu * w_nu(t + tau - T_j)
///                        for internal edges; zero on boundary edges.
inline BrokenLinear apply_ell_tilde(const DelaySystem& sys, const Mesh& mesh,
                                    const BrokenLinear& w) {
    require_matches(mesh, w);
    BrokenLinear z = BrokenLinear::zeros(mesh);
    const std::int64_t nt = mesh.n_tau;
    for (int j = 1; j <= mesh.tree.m; ++j) {
        const std::int64_t n = mesh.num_elems[j];
        for (std::int64_t p = 0; p < n - nt; ++p) {
            z.elems[j][p].left = sys.c[j] * w.elems[j][p + nt].left;
            z.elems[j][p].right = sys.c[j] * w.elems[j][p + nt].right;
        }
        if (mesh.boundary_edge(j)) continue;
        for (std::int64_t p = n - nt; p < n; ++p) {
            double l = 0.0, r = 0.0;
            for (int nu : children(mesh.tree, j)) {
                const auto& e = w.elems[nu][p - (n - nt)];
                l += sys.c[nu] * e.left;
                r += sys.c[nu] * e.right;
            }
            z.elems[j][p].left = l;
            z.elems[j][p].right = r;
        }
    }
    return z;
}

struct VertexCoupling {
    double beta = 0.0;
    double gamma = 0.0;
};

/// Coupling coefficients of the vertex conditions at the internal vertices:
/// beta_j = b_j - sum of child b, gamma_j = c_j - sum of child c.
inline std::vector<VertexCoupling> vertex_coupling(const DelaySystem& sys) {
    std::vector<VertexCoupling> out(sys.tree.d + 1);
    for (int j = 1; j <= sys.tree.d; ++j) {
        double beta = sys.b[j], gamma = sys.c[j];
        for (int nu : children(sys.tree, j)) {
            beta -= sys.b[nu];
            gamma -= sys.c[nu];
        }
        out[j] = {beta, gamma};
    }
    return out;
}

} // namespace graphdamp
