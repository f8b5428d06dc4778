#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "graphdamp/function.hpp"
#include "graphdamp/solver.hpp"
#include "graphdamp/system.hpp"

namespace graphdamp {

/// Energy J(y) evaluated from scratch: per element, ell y at both endpoints
/// by direct nodal indexing and Simpson's rule for the squared linear
/// function. Intentionally repeats none of the delay_ops/solver code so the
/// two quadratures check each other.
inline double oracle_energy(const DelaySystem& sys, const Mesh& mesh, const TreeFunction& y) {
    require_matches(mesh, y);
    const std::int64_t nt = mesh.n_tau;
    double total = 0.0;
    for (int j = 1; j <= mesh.tree.m; ++j) {
        const auto& v = y.values[j];
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            double dl, dr;
            if (p >= nt) {
                dl = v[p - nt];
                dr = v[p - nt + 1];
            } else if (j == 1) {
                dl = y.prehistory[p];
                dr = y.prehistory[p + 1];
            } else {
                const auto& vp = y.values[mesh.tree.parent_vertex[j]];
                const std::int64_t q = mesh.num_elems[mesh.tree.parent_vertex[j]] - nt + p;
                dl = vp[q];
                dr = vp[q + 1];
            }
            const double slope = (v[p + 1] - v[p]) / mesh.h;
            const double ql = slope + sys.b[j] * v[p] + sys.c[j] * dl;
            const double qr = slope + sys.b[j] * v[p + 1] + sys.c[j] * dr;
            const double qm = 0.5 * (ql + qr);
            total += mesh.h / 6.0 * (ql * ql + 4.0 * qm * qm + qr * qr);
        }
    }
    return total;
}

/// Brute-force minimizer: J is exactly quadratic in the free dofs, so a
/// central-difference gradient and a four-point second-difference Hessian
/// (step 1, no truncation error) recover it, and one dense SPD solve gives
/// the minimizer x = -H^{-1} g from the zero start.
inline TreeFunction oracle_solve(const DelaySystem& sys, const Mesh& mesh) {
    if (mesh.n_free > 2000) throw validation_error("oracle limited to desk scale");
    const std::int64_t n = mesh.n_free;
    const TreeFunction base = build_lift(sys, mesh);
    if (n == 0) return base;

    std::vector<double> x(n, 0.0);
    const auto probe = [&](std::int64_t i, double si, std::int64_t k, double sk) {
        x[i] += si;
        x[k] += sk;
        TreeFunction y = base;
        scatter_add(mesh, x, y);
        const double e = oracle_energy(sys, mesh, y);
        x[i] -= si;
        x[k] -= sk;
        return e;
    };

    Eigen::VectorXd g(n);
    for (std::int64_t i = 0; i < n; ++i)
        g[i] = 0.5 * (probe(i, 1.0, i, 0.0) - probe(i, -1.0, i, 0.0));

    Eigen::MatrixXd hess(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t k = 0; k <= i; ++k) {
            const double hik = 0.25 * (probe(i, 1.0, k, 1.0) - probe(i, 1.0, k, -1.0) -
                                       probe(i, -1.0, k, 1.0) + probe(i, -1.0, k, -1.0));
            hess(i, k) = hik;
            hess(k, i) = hik;
        }

    const Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success)
        throw numerical_error("oracle detected non-coercive discretization");
    const Eigen::VectorXd sol = llt.solve(-g);

    TreeFunction y = base;
    scatter_add(mesh, std::vector<double>(sol.data(), sol.data() + sol.size()), y);
    return y;
}

} // namespace graphdamp
