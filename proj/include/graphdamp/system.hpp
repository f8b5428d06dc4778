#pragma once

#include <cstdint>
#include <vector>

#include "graphdamp/function.hpp"
#include "graphdamp/mesh.hpp"
#include "graphdamp/tree.hpp"

namespace graphdamp {

/// State of the system on [-tau, 0] before control starts. Either polynomial
/// coefficients (c0 + c1*t + ...) or raw nodal samples at spacing h; samples
/// are only usable with the grid they were taken for.
struct Prehistory {
    enum class Kind { polynomial, samples };
    Kind kind = Kind::polynomial;
    std::vector<double> coeffs{0.0};
    std::vector<double> samples;

    static Prehistory constant(double v) { return Prehistory{Kind::polynomial, {v}, {}}; }
    static Prehistory polynomial(std::vector<double> c) {
        return Prehistory{Kind::polynomial, std::move(c), {}};
    }
    static Prehistory from_samples(std::vector<double> v) {
        return Prehistory{Kind::samples, {}, std::move(v)};
    }

    double eval_polynomial(double t) const {
        // Horner in extended precision; polynomial degrees stay small.
        long double acc = 0.0L;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            acc = acc * static_cast<long double>(t) + static_cast<long double>(*it);
        return static_cast<double>(acc);
    }

    /// Nodal samples at t = -tau + p*h, p = 0..n_tau.
    std::vector<double> sample(const Mesh& mesh) const {
        const std::int64_t n = mesh.n_tau;
        if (kind == Kind::samples) {
            if (static_cast<std::int64_t>(samples.size()) != n + 1)
                throw validation_error(
                    "prehistory samples must have tau_units*refine + 1 values for this grid");
            return samples;
        }
        std::vector<double> out(n + 1);
        for (std::int64_t p = 0; p <= n; ++p)
            out[p] = eval_polynomial(static_cast<double>(p - n) * mesh.h);
        return out;
    }

    double value_at_zero(const Mesh& mesh) const { return sample(mesh).back(); }
};

/// A full problem instance: the metric tree, the delay, per-edge coefficients
/// of the first-order operator, and the prehistory.
struct DelaySystem {
    RootedTree tree;
    std::int64_t tau_units = 1;
    double unit = 1.0;
    std::vector<double> b; // 1-based per edge
    std::vector<double> c; // 1-based per edge
    Prehistory phi;

    double tau() const { return static_cast<double>(tau_units) * unit; }
    double edge_length(int j) const { return static_cast<double>(tree.length_units[j]) * unit; }
};

inline DelaySystem make_system(RootedTree tree, std::int64_t tau_units, double unit,
                               std::vector<double> b, std::vector<double> c, Prehistory phi) {
    if (tau_units < 1) throw validation_error("delay must be a positive number of units");
    if (!(unit > 0.0)) throw validation_error("unit must be positive");
    for (int j = 1; j <= tree.m; ++j)
        if (tree.length_units[j] <= tau_units)
            throw validation_error("delay must be shorter than every edge");
    if (static_cast<int>(b.size()) == tree.m) b.insert(b.begin(), 0.0);
    if (static_cast<int>(c.size()) == tree.m) c.insert(c.begin(), 0.0);
    if (static_cast<int>(b.size()) != tree.m + 1 || static_cast<int>(c.size()) != tree.m + 1)
        throw validation_error("need one b and one c coefficient per edge");
    return DelaySystem{std::move(tree), tau_units, unit, std::move(b), std::move(c), std::move(phi)};
}

inline Mesh build_mesh(const DelaySystem& sys, int refine) {
    return build_mesh(sys.tree, sys.tau_units, sys.unit, refine);
}

} // namespace graphdamp
