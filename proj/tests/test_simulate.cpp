#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "graphdamp/simulate.hpp"

using namespace graphdamp;

namespace {

DelaySystem interval_system(double b, double c, Prehistory phi = Prehistory::constant(1.0)) {
    RootedTree t = build_tree({0}, {3});
    return make_system(t, 1, 1.0, {b}, {c}, std::move(phi));
}

} // namespace

TEST_CASE("exponential step constants") {
    SECTION("b = 0 reduces to the trapezoid rule") {
        detail::ExpStep s(0.0, 0.5);
        CHECK(s.e == 1.0);
        CHECK(s.advance(2.0, 3.0, 5.0) == Catch::Approx(2.0 + 0.5 * 4.0).epsilon(1e-15));
    }
    SECTION("homogeneous decay is exact") {
        detail::ExpStep s(1.0, 1.0);
        CHECK(s.advance(1.0, 0.0, 0.0) == Catch::Approx(0.36787944117144233).epsilon(1e-16));
    }
    SECTION("constant forcing reaches b*y = f equilibrium exactly") {
        // y' + 2y = 6 from y0 = 3 stays at the fixed point y = 3
        detail::ExpStep s(2.0, 0.7);
        CHECK(s.advance(3.0, 6.0, 6.0) == Catch::Approx(3.0).epsilon(1e-15));
    }
    SECTION("series and closed form agree at the switch point") {
        const double h = 1.0;
        // either side of |bh| = 0.5 picks a different evaluation path; both
        // must match the extended-precision closed form at their own x
        for (double b : {0.49999999, 0.50000001, -0.49999999, -0.50000001}) {
            detail::ExpStep s(b, h);
            const long double x = static_cast<long double>(b) * h;
            CHECK(s.p == Catch::Approx(static_cast<double>(-std::expm1(-x) / x))
                             .epsilon(1e-14));
            CHECK(s.q == Catch::Approx(static_cast<double>((x - 1.0L + std::exp(-x)) / (x * x)))
                             .epsilon(1e-14));
        }
        // linear forcing f(t) = t over one unit step with b = 1:
        // y1 = e^{-1} y0 + integral_0^1 e^{s-1} s ds = e^{-1} y0 + e^{-1}
        detail::ExpStep unit(1.0, 1.0);
        CHECK(unit.advance(1.0, 0.0, 1.0) ==
              Catch::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    }
}

TEST_CASE("zero control leaves the uncontrolled dynamics") {
    // b = c = 0, u = 0: y stays at phi(0) forever
    DelaySystem sys = interval_system(0.0, 0.0);
    Mesh mesh = build_mesh(sys, 4);
    TreeFunction y = simulate(sys, mesh, BrokenLinear::zeros(mesh));
    for (double v : y.values[1]) CHECK(v == 1.0);
}

TEST_CASE("pure decay matches the exponential") {
    DelaySystem sys = interval_system(1.0, 0.0);
    Mesh mesh = build_mesh(sys, 8);
    TreeFunction y = simulate(sys, mesh, BrokenLinear::zeros(mesh));
    for (std::int64_t i = 0; i <= mesh.num_elems[1]; ++i)
        CHECK(y.values[1][i] == Catch::Approx(std::exp(-static_cast<double>(i) * mesh.h))
                                    .epsilon(1e-13));
}

TEST_CASE("pure delay term follows the method of steps") {
    // y' = -y(t-1), phi = 1: y = 1 - t on [0,1], then 1 - t + (t-1)^2/2 on [1,2]
    DelaySystem sys = interval_system(0.0, 1.0);
    Mesh mesh = build_mesh(sys, 8);
    TreeFunction y = simulate(sys, mesh, BrokenLinear::zeros(mesh));
    const double h = mesh.h;
    for (std::int64_t i = 0; i <= 8; ++i)
        CHECK(y.values[1][i] == Catch::Approx(1.0 - i * h).margin(1e-14));
    for (std::int64_t i = 8; i <= 16; ++i) {
        const double t = i * h;
        // stage two is quadratic, but its slope is element-wise linear in the
        // scheme's data, so the trapezoid step still lands exactly on it
        CHECK(y.values[1][i] ==
              Catch::Approx(1.0 - t + 0.5 * (t - 1.0) * (t - 1.0)).margin(1e-13));
    }
}

TEST_CASE("vertex handoff carries the state into children") {
    RootedTree t = build_tree({0, 1, 1}, {2, 2, 2});
    DelaySystem sys = make_system(t, 1, 1.0, {0, 0, 0}, {0, 0, 0}, Prehistory::constant(2.0));
    Mesh mesh = build_mesh(sys, 2);
    BrokenLinear u = BrokenLinear::zeros(mesh);
    for (auto& e : u.elems[1]) e = {1.0, 1.0}; // constant push on the root edge
    TreeFunction y = simulate(sys, mesh, u);
    CHECK(y.values[1].back() == Catch::Approx(2.0 + 2.0).epsilon(1e-15));
    CHECK(y.values[2][0] == y.values[1].back());
    CHECK(y.values[3][0] == y.values[1].back());
    CHECK(y.values[2].back() == y.values[2][0]); // nothing drives the children
}

TEST_CASE("simulation diverged") {
    DelaySystem sys = interval_system(-800.0, 0.0);
    Mesh mesh = build_mesh(sys, 1);
    CHECK_THROWS_WITH(simulate(sys, mesh, BrokenLinear::zeros(mesh)), "simulation diverged");
}

TEST_CASE("verify_damping scans the target windows") {
    DelaySystem sys = interval_system(0.0, 0.0);
    Mesh mesh = build_mesh(sys, 2); // n = 6, window nodes 4..6
    TreeFunction y = TreeFunction::zeros(mesh);
    y.values[1] = {9.0, 9.0, 9.0, 9.0, 0.25, -0.5, 0.125};
    auto damp = verify_damping(y, mesh);
    REQUIRE(damp.size() == 2);
    CHECK(damp[1] == 0.5);
}
