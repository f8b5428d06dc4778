#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graphdamp/delay_ops.hpp"
#include "graphdamp/function.hpp"
#include "graphdamp/system.hpp"

namespace graphdamp {

/// Lift of the inhomogeneous data: prehistory samples on [-tau, 0], the ramp
/// phi(0)*(T_1 - t)/T_1 down the first edge, zero elsewhere. Nodes inside a
/// target window are clamped to zero so the lift satisfies every fixed dof
/// (the clamp only acts when edge 1 is itself a boundary edge).
inline TreeFunction build_lift(const DelaySystem& sys, const Mesh& mesh) {
    TreeFunction f = TreeFunction::zeros(mesh);
    f.prehistory = sys.phi.sample(mesh);
    const double phi0 = f.prehistory.back();
    const std::int64_t n1 = mesh.num_elems[1];
    for (std::int64_t i = 0; i <= n1; ++i)
        f.values[1][i] = phi0 * static_cast<double>(n1 - i) / static_cast<double>(n1);
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t i = 0; i <= mesh.num_elems[j]; ++i)
            if (mesh.dof[j][i] == Mesh::kFixedTarget) f.values[j][i] = 0.0;
    return f;
}

/// B(yA, yB) = sum_j integral of (ell_j yA)(ell_j yB): both factors are
/// element-wise linear, so the 2x2 mass rule per element is exact.
inline double bilinear_apply(const DelaySystem& sys, const Mesh& mesh, const TreeFunction& ya,
                             const TreeFunction& yb) {
    const BrokenLinear wa = apply_ell(sys, mesh, ya);
    const BrokenLinear wb = apply_ell(sys, mesh, yb);
    double acc = 0.0;
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            const auto& a = wa.elems[j][p];
            const auto& b = wb.elems[j][p];
            acc += 2.0 * a.left * b.left + a.left * b.right + a.right * b.left +
                   2.0 * a.right * b.right;
        }
    return acc * mesh.h / 6.0;
}

namespace detail {

// Endpoint values of ell e on one element as linear forms over the free
// dofs; fixed nodes and prehistory contribute through the lift instead.
// At most three terms per endpoint: the two local nodes and a delayed node
// (which may alias a local one when n_tau is small; accumulation copes).
struct ElemForm {
    struct Term {
        std::int64_t dof;
        double coeff;
    };
    Term left[3];
    Term right[3];
    int n_left = 0;
    int n_right = 0;

    void add_left(std::int64_t dof, double c) {
        if (dof >= 0) left[n_left++] = {dof, c};
    }
    void add_right(std::int64_t dof, double c) {
        if (dof >= 0) right[n_right++] = {dof, c};
    }
};

inline ElemForm element_form(const DelaySystem& sys, const Mesh& mesh, int j, std::int64_t p) {
    ElemForm f;
    const double inv_h = 1.0 / mesh.h;
    const auto& dj = mesh.dof[j];
    f.add_left(dj[p], sys.b[j] - inv_h);
    f.add_left(dj[p + 1], inv_h);
    f.add_right(dj[p], -inv_h);
    f.add_right(dj[p + 1], inv_h + sys.b[j]);
    if (sys.c[j] != 0.0) {
        const std::int64_t nt = mesh.n_tau;
        if (p >= nt) {
            f.add_left(dj[p - nt], sys.c[j]);
            f.add_right(dj[p - nt + 1], sys.c[j]);
        } else if (j != 1) { // else: prehistory, pure data
            const int parent = mesh.tree.parent_vertex[j];
            const std::int64_t q = mesh.num_elems[parent] - nt + p;
            f.add_left(mesh.dof[parent][q], sys.c[j]);
            f.add_right(mesh.dof[parent][q + 1], sys.c[j]);
        }
    }
    return f;
}

} // namespace detail

/// Pair an element-wise linear w against ell of every free hat function:
/// r_i = sum over elements of the mass rule between w and ell e_i. With
/// w = ell y this is the vector of weak-form values B(y, e_i).
inline Eigen::VectorXd pair_with_tests(const DelaySystem& sys, const Mesh& mesh,
                                       const BrokenLinear& w) {
    require_matches(mesh, w);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.n_free);
    const double s = mesh.h / 6.0;
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            const detail::ElemForm f = detail::element_form(sys, mesh, j, p);
            const auto& e = w.elems[j][p];
            const double wl = s * (2.0 * e.left + e.right);
            const double wr = s * (e.left + 2.0 * e.right);
            for (int k = 0; k < f.n_left; ++k) r[f.left[k].dof] += wl * f.left[k].coeff;
            for (int k = 0; k < f.n_right; ++k) r[f.right[k].dof] += wr * f.right[k].coeff;
        }
    return r;
}

struct Assembled {
    Eigen::SparseMatrix<double> gram; // B(e_i, e_k) over free dofs
    Eigen::VectorXd load;             // -B(lift, e_i)
};

inline Assembled assemble(const DelaySystem& sys, const Mesh& mesh) {
    Assembled out;
    std::vector<Eigen::Triplet<double>> trip;
    std::int64_t elems = 0;
    for (int j = 1; j <= mesh.tree.m; ++j) elems += mesh.num_elems[j];
    trip.reserve(static_cast<std::size_t>(elems) * 18);

    const double s = mesh.h / 6.0;
    for (int j = 1; j <= mesh.tree.m; ++j)
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            const detail::ElemForm f = detail::element_form(sys, mesh, j, p);
            for (int a = 0; a < f.n_left; ++a) {
                for (int b = 0; b < f.n_left; ++b)
                    trip.emplace_back(f.left[a].dof, f.left[b].dof,
                                      2.0 * s * f.left[a].coeff * f.left[b].coeff);
                for (int b = 0; b < f.n_right; ++b)
                    trip.emplace_back(f.left[a].dof, f.right[b].dof,
                                      s * f.left[a].coeff * f.right[b].coeff);
            }
            for (int a = 0; a < f.n_right; ++a) {
                for (int b = 0; b < f.n_left; ++b)
                    trip.emplace_back(f.right[a].dof, f.left[b].dof,
                                      s * f.right[a].coeff * f.left[b].coeff);
                for (int b = 0; b < f.n_right; ++b)
                    trip.emplace_back(f.right[a].dof, f.right[b].dof,
                                      2.0 * s * f.right[a].coeff * f.right[b].coeff);
            }
        }

    out.gram.resize(mesh.n_free, mesh.n_free);
    out.gram.setFromTriplets(trip.begin(), trip.end());
    out.load = -pair_with_tests(sys, mesh, apply_ell(sys, mesh, build_lift(sys, mesh)));
    return out;
}

/// Plain conjugate gradients, kept as the fallback when the direct
/// factorization balks; the Gram matrix of a valid instance is SPD, so a
/// non-positive curvature here means the discretization itself is broken.
inline Eigen::VectorXd conjugate_gradient(const Eigen::SparseMatrix<double>& a,
                                          const Eigen::VectorXd& rhs,
                                          std::int64_t* iterations = nullptr) {
    const double target = 1e-12 * rhs.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = rhs;
    double rr = r.squaredNorm();
    const std::int64_t max_iter = 10 * rhs.size();
    for (std::int64_t it = 0; it <= max_iter; ++it) {
        if (std::sqrt(rr) <= target) {
            if (iterations) *iterations = it;
            return x;
        }
        if (it == max_iter) break;
        const Eigen::VectorXd ap = a * p;
        const double pap = p.dot(ap);
        if (pap <= 0.0) throw numerical_error("coercivity violated");
        const double alpha = rr / pap;
        x += alpha * p;
        r -= alpha * ap;
        const double rr_next = r.squaredNorm();
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    throw numerical_error("linear solver stalled");
}

struct SolveResult {
    TreeFunction y;  // lift + scattered free solution
    BrokenLinear u;  // extracted control ell y
    double energy = 0.0;
    double gram_condition_hint = 1.0; // max/min Gram diagonal, cheap scaling clue
    std::int64_t n_free = 0;
    std::int64_t cg_iterations = 0; // zero when the factorization succeeded
    bool used_fallback = false;
};

inline SolveResult solve_bvp(const DelaySystem& sys, const Mesh& mesh) {
    const Assembled a = assemble(sys, mesh);
    SolveResult res;
    res.n_free = mesh.n_free;
    res.y = build_lift(sys, mesh);
    if (mesh.n_free > 0) {
        const Eigen::VectorXd diag = a.gram.diagonal();
        res.gram_condition_hint = diag.maxCoeff() / diag.minCoeff();

        Eigen::VectorXd x;
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(a.gram);
        if (llt.info() == Eigen::Success) {
            x = llt.solve(a.load);
        } else {
            res.used_fallback = true;
            x = conjugate_gradient(a.gram, a.load, &res.cg_iterations);
        }
        scatter_add(mesh, std::vector<double>(x.data(), x.data() + x.size()), res.y);
    }
    res.u = apply_ell(sys, mesh, res.y);
    res.energy = bilinear_apply(sys, mesh, res.y, res.y);
    return res;
}

} // namespace graphdamp
