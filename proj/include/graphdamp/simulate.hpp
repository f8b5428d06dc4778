#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "graphdamp/delay_ops.hpp"
#include "graphdamp/function.hpp"
#include "graphdamp/system.hpp"

namespace graphdamp {

namespace detail {

// One exact step of y' + b*y = f over an element, f linear with endpoint
// values (fl, fr):  y1 = E*y0 + P*fl + Q*(fr - fl), where
//   E = exp(-b h),  P = (1 - E)/b,  Q = (b h - 1 + E)/(b^2 h).
// Q cancels catastrophically for small b*h, so it switches to its series
// sum_k (-bh)^k / (k+2)!  * h; at b = 0 the step is the exact trapezoid.
struct ExpStep {
    double e, p, q;

    explicit ExpStep(double b, double h) {
        const double x = b * h;
        e = std::exp(-x);
        if (std::abs(x) <= 0.5) {
            p = h * series(x, 1);
            q = h * series(x, 2);
        } else {
            p = -std::expm1(-x) / b;
            q = (x - 1.0 + e) / (b * b * h);
        }
    }

    double advance(double y0, double fl, double fr) const {
        return e * y0 + p * fl + q * (fr - fl);
    }

  private:
    // sum_{k>=0} (-x)^k / (k+shift)!
    static double series(double x, int shift) {
        double fact = 1.0;
        for (int k = 1; k <= shift; ++k) fact *= k;
        double term = 1.0 / fact, sum = term;
        for (int k = 1; k <= 16; ++k) {
            term *= -x / (k + shift);
            sum += term;
            if (std::abs(term) < 1e-20 * std::abs(sum)) break;
        }
        return sum;
    }
};

} // namespace detail

/// Integrate the controlled system forward from the prehistory: each edge is
/// an exact per-element exponential step of y' + b_j*y = u - c_j*y(.-tau),
/// edges processed parents before children so the delayed values and the
/// vertex handoff y_child(0) = y_parent(T) are already available.
inline TreeFunction simulate(const DelaySystem& sys, const Mesh& mesh, const BrokenLinear& u) {
    require_matches(mesh, u);
    TreeFunction y = TreeFunction::zeros(mesh);
    y.prehistory = sys.phi.sample(mesh);

    for (int j = 1; j <= mesh.tree.m; ++j) {
        auto& v = y.values[j];
        v[0] = j == 1 ? y.prehistory.back() : y.values[mesh.tree.parent_vertex[j]].back();

        const detail::ExpStep step(sys.b[j], mesh.h);
        const double cj = sys.c[j];
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            const auto [dl, dr] = delayed_pair(mesh, y, j, p);
            const double fl = u.elems[j][p].left - cj * dl;
            const double fr = u.elems[j][p].right - cj * dr;
            v[p + 1] = step.advance(v[p], fl, fr);
            if (!std::isfinite(v[p + 1])) throw numerical_error("simulation diverged");
        }
    }
    return y;
}

/// Largest |y| over the nodes of each boundary edge's target window
/// [T_j - tau, T_j]; index by edge, zero for internal edges.
inline std::vector<double> verify_damping(const TreeFunction& y, const Mesh& mesh) {
    require_matches(mesh, y);
    std::vector<double> out(mesh.tree.m + 1, 0.0);
    for (int j = mesh.tree.d + 1; j <= mesh.tree.m; ++j) {
        double worst = 0.0;
        for (std::int64_t i = mesh.num_elems[j] - mesh.n_tau; i <= mesh.num_elems[j]; ++i)
            worst = std::max(worst, std::abs(y.values[j][i]));
        out[j] = worst;
    }
    return out;
}

} // namespace graphdamp
