#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "graphdamp/delay_ops.hpp"
#include "graphdamp/simulate.hpp"
#include "graphdamp/solver.hpp"

namespace graphdamp {

/// max_i |B(y, e_i)| over the free basis; zero for an exact Galerkin solution
/// up to the linear-solve residual.
inline double weak_residual(const DelaySystem& sys, const Mesh& mesh, const TreeFunction& y) {
    require_matches(mesh, y);
    const Eigen::VectorXd r = pair_with_tests(sys, mesh, apply_ell(sys, mesh, y));
    return r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
}

/// Defect of the nonlocal Kirchhoff-type condition at each internal vertex:
///   |y_j'(T_j) - sum_nu y_nu'(0) + beta_j y_j(T_j) + gamma_j y_j(T_j - tau)|
/// with one-sided derivatives from second-order three-node stencils.
/// Entry j-1 holds vertex j; empty when the tree has no internal vertex.
inline std::vector<double> kirchhoff_residual(const DelaySystem& sys, const Mesh& mesh,
                                              const TreeFunction& y) {
    require_matches(mesh, y);
    const auto coupling = vertex_coupling(sys);
    std::vector<double> out;
    out.reserve(mesh.tree.d);
    for (int j = 1; j <= mesh.tree.d; ++j) {
        const auto& vj = y.values[j];
        const std::int64_t n = mesh.num_elems[j];
        double acc = (3.0 * vj[n] - 4.0 * vj[n - 1] + vj[n - 2]) / (2.0 * mesh.h);
        for (int nu : children(mesh.tree, j)) {
            const auto& vn = y.values[nu];
            acc -= (-3.0 * vn[0] + 4.0 * vn[1] - vn[2]) / (2.0 * mesh.h);
        }
        acc += coupling[j].beta * vj[n] + coupling[j].gamma * vj[n - mesh.n_tau];
        out.push_back(std::abs(acc));
    }
    return out;
}

/// Per-edge RMS of the second-order equation -(ell y)' + b ell y + ell~ y
/// sampled at interior element midpoints of (0, l_j), where l_j stops short
/// of the target window on boundary edges. The derivative uses centered
/// differences of element means, so this is a convergence diagnostic, not an
/// exact-zero gate. Entry j-1 holds edge j.
inline std::vector<double> strong_residual(const DelaySystem& sys, const Mesh& mesh,
                                           const TreeFunction& y) {
    require_matches(mesh, y);
    const BrokenLinear w = apply_ell(sys, mesh, y);
    const BrokenLinear z = apply_ell_tilde(sys, mesh, w);
    std::vector<double> out;
    out.reserve(mesh.tree.m);
    for (int j = 1; j <= mesh.tree.m; ++j) {
        const std::int64_t stop =
            mesh.boundary_edge(j) ? mesh.num_elems[j] - mesh.n_tau : mesh.num_elems[j];
        const auto mean = [&](std::int64_t p) {
            return 0.5 * (w.elems[j][p].left + w.elems[j][p].right);
        };
        double sum = 0.0;
        std::int64_t count = 0;
        for (std::int64_t p = 1; p + 1 < stop; ++p) {
            const double dw = (mean(p + 1) - mean(p - 1)) / (2.0 * mesh.h);
            const double zm = 0.5 * (z.elems[j][p].left + z.elems[j][p].right);
            const double r = -dw + sys.b[j] * mean(p) + zm;
            sum += r * r;
            ++count;
        }
        out.push_back(count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0);
    }
    return out;
}

/// Discrete L2 distance between solutions on nested grids, sampled at the
/// coarse nodes (trapezoid weights). Levels must differ by exactly one
/// halving.
inline double grid_difference_norm(const Mesh& coarse, const TreeFunction& yc, const Mesh& fine,
                                   const TreeFunction& yf) {
    require_matches(coarse, yc);
    require_matches(fine, yf);
    if (fine.refine != 2 * coarse.refine || fine.tree.m != coarse.tree.m)
        throw validation_error("refinement levels are not nested");
    double acc = 0.0;
    for (int j = 1; j <= coarse.tree.m; ++j) {
        const std::int64_t n = coarse.num_elems[j];
        for (std::int64_t i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            const double diff = yc.values[j][i] - yf.values[j][2 * i];
            acc += w * diff * diff;
        }
    }
    return std::sqrt(acc * coarse.h);
}

/// Exact W_2^1 norm of the piecewise-linear y over the tree edges.
inline double w21_norm(const Mesh& mesh, const TreeFunction& y) {
    require_matches(mesh, y);
    double acc = 0.0;
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            const double l = y.values[j][p];
            const double r = y.values[j][p + 1];
            acc += mesh.h / 3.0 * (l * l + l * r + r * r) + (r - l) * (r - l) / mesh.h;
        }
    return std::sqrt(acc);
}

/// Same norm for the prehistory samples on [-tau, 0].
inline double w21_prehistory_norm(const Mesh& mesh, const TreeFunction& y) {
    require_matches(mesh, y);
    double acc = 0.0;
    for (std::int64_t p = 0; p < mesh.n_tau; ++p) {
        const double l = y.prehistory[p];
        const double r = y.prehistory[p + 1];
        acc += mesh.h / 3.0 * (l * l + l * r + r * r) + (r - l) * (r - l) / mesh.h;
    }
    return std::sqrt(acc);
}

struct ConstraintReport {
    double continuity = 0.0; // worst vertex gap |y_j(0) - y_parent(T)|
    double prehistory = 0.0; // worst defect against the sampled prehistory
    double target = 0.0;     // worst |y| inside a target window
};

inline ConstraintReport constraint_residuals(const DelaySystem& sys, const Mesh& mesh,
                                             const TreeFunction& y) {
    require_matches(mesh, y);
    ConstraintReport rep;
    const std::vector<double> ph = sys.phi.sample(mesh);
    for (std::int64_t p = 0; p <= mesh.n_tau; ++p)
        rep.prehistory = std::max(rep.prehistory, std::abs(y.prehistory[p] - ph[p]));
    rep.prehistory = std::max(rep.prehistory, std::abs(y.values[1][0] - ph.back()));

    for (int j = 2; j <= mesh.tree.m; ++j) {
        const int parent = mesh.tree.parent_vertex[j];
        rep.continuity =
            std::max(rep.continuity, std::abs(y.values[j][0] - y.values[parent].back()));
    }

    const std::vector<double> damp = verify_damping(y, mesh);
    for (int j = mesh.tree.d + 1; j <= mesh.tree.m; ++j) rep.target = std::max(rep.target, damp[j]);
    return rep;
}

} // namespace graphdamp
