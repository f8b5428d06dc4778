#include <catch2/catch_amalgamated.hpp>

#include "graphdamp/checker.hpp"
#include "instances.hpp"

using namespace graphdamp;

TEST_CASE("weak residual vanishes for the Galerkin solution and not for the lift") {
    DelaySystem sys = instances::load("star");
    Mesh mesh = build_mesh(sys, 4);
    SolveResult res = solve_bvp(sys, mesh);
    CHECK(weak_residual(sys, mesh, res.y) <= 1e-10 * (1.0 + res.energy));
    CHECK(weak_residual(sys, mesh, build_lift(sys, mesh)) > 1e-3);
    CHECK(weak_residual(sys, mesh, TreeFunction::zeros(mesh)) == 0.0);
}

TEST_CASE("kirchhoff residual on hand solutions") {
    DelaySystem sys = instances::load("star");
    Mesh mesh = build_mesh(sys, 2);
    SolveResult res = solve_bvp(sys, mesh);
    auto kr = kirchhoff_residual(sys, mesh, res.y);
    REQUIRE(kr.size() == 1);
    CHECK(kr[0] <= 1e-10); // -1/4 - (-1/8 - 1/8) = 0
}

TEST_CASE("kirchhoff residual of constants") {
    RootedTree t = build_tree({0, 1, 1}, {3, 3, 3});
    const double K = 2.5;
    SECTION("classical coefficients see no defect") {
        DelaySystem sys = make_system(t, 1, 1.0, {1.0, 0.5, 0.5}, {0.4, 0.2, 0.2},
                                      Prehistory::constant(K));
        Mesh mesh = build_mesh(sys, 2);
        TreeFunction y = TreeFunction::zeros(mesh);
        for (int j = 1; j <= 3; ++j)
            for (auto& v : y.values[j]) v = K;
        auto kr = kirchhoff_residual(sys, mesh, y);
        CHECK(kr[0] <= 1e-14);
    }
    SECTION("nonzero beta+gamma is detected exactly") {
        DelaySystem sys = make_system(t, 1, 1.0, {1.0, 2.0, 3.0}, {0.5, 0.25, 0.125},
                                      Prehistory::constant(K));
        Mesh mesh = build_mesh(sys, 2);
        TreeFunction y = TreeFunction::zeros(mesh);
        for (int j = 1; j <= 3; ++j)
            for (auto& v : y.values[j]) v = K;
        const double beta = 1.0 - 5.0, gamma = 0.5 - 0.375;
        auto kr = kirchhoff_residual(sys, mesh, y);
        CHECK(kr[0] == Catch::Approx(std::abs(K * (beta + gamma))).epsilon(1e-13));
    }
}

TEST_CASE("kirchhoff residual is empty without internal vertices") {
    DelaySystem sys = instances::load("interval");
    Mesh mesh = build_mesh(sys, 2);
    CHECK(kirchhoff_residual(sys, mesh, solve_bvp(sys, mesh).y).empty());
}

TEST_CASE("piecewise-linear family: checker is exact at every refinement") {
    for (const char* name : {"interval", "star"}) {
        DelaySystem sys = instances::load(name);
        for (int refine : {1, 2, 4, 8}) {
            Mesh mesh = build_mesh(sys, refine);
            SolveResult res = solve_bvp(sys, mesh);
            for (double v : kirchhoff_residual(sys, mesh, res.y)) CHECK(v <= 1e-10);
            for (double v : strong_residual(sys, mesh, res.y)) CHECK(v <= 1e-10);
        }
    }
}

TEST_CASE("classical-coefficient instance: kirchhoff residual decays") {
    DelaySystem sys = instances::load("star_classical");
    double prev = -1.0;
    for (int refine : {2, 4, 8}) {
        Mesh mesh = build_mesh(sys, refine);
        SolveResult res = solve_bvp(sys, mesh);
        auto kr = kirchhoff_residual(sys, mesh, res.y);
        REQUIRE(kr.size() == 1);
        if (prev >= 0.0) CHECK(kr[0] < prev);
        prev = kr[0];
    }
}

TEST_CASE("coefficient step: the slope gap matches the nonlocal condition") {
    DelaySystem sys = instances::load("path2_jump"); // b = (0, 2), c = 0
    Mesh mesh = build_mesh(sys, 32);
    SolveResult res = solve_bvp(sys, mesh);
    const auto& y1 = res.y.values[1];
    const auto& y2 = res.y.values[2];
    const std::int64_t n = mesh.num_elems[1];
    const double h = mesh.h;
    const double left = (3 * y1[n] - 4 * y1[n - 1] + y1[n - 2]) / (2 * h);
    const double right = (-3 * y2[0] + 4 * y2[1] - y2[2]) / (2 * h);
    const double beta1 = 0.0 - 2.0;
    const double vertex = y1[n];
    CHECK(std::abs(vertex) > 0.05); // the state is genuinely nonzero here
    // one-sided slopes differ by -beta1*y(v1): a real kink, not smoothness
    CHECK(left - right == Catch::Approx(-beta1 * vertex)
                              .margin(kirchhoff_residual(sys, mesh, res.y)[0] + 1e-4));
    CHECK(std::abs(left - right) > 0.05);
}

TEST_CASE("strong residual decays under refinement on mixed coefficients") {
    DelaySystem sys = instances::load("bramble_mixed");
    std::vector<double> maxima;
    for (int refine : {2, 4, 8}) {
        Mesh mesh = build_mesh(sys, refine);
        SolveResult res = solve_bvp(sys, mesh);
        double worst = 0.0;
        for (double v : strong_residual(sys, mesh, res.y)) worst = std::max(worst, v);
        maxima.push_back(worst);
    }
    CHECK(maxima[1] < maxima[0]);
    CHECK(maxima[2] < maxima[1]);
}

TEST_CASE("constraint residuals are structural zeros for scatter-built functions") {
    DelaySystem sys = instances::load("bramble_mixed");
    Mesh mesh = build_mesh(sys, 2);
    SolveResult res = solve_bvp(sys, mesh);
    ConstraintReport rep = constraint_residuals(sys, mesh, res.y);
    CHECK(rep.continuity == 0.0);
    CHECK(rep.prehistory == 0.0);
    CHECK(rep.target == 0.0);
}

TEST_CASE("constraint residuals report a broken vertex gap exactly") {
    DelaySystem sys = instances::load("star");
    Mesh mesh = build_mesh(sys, 2);
    TreeFunction y = solve_bvp(sys, mesh).y;
    y.values[3][0] += 0.125;
    ConstraintReport rep = constraint_residuals(sys, mesh, y);
    CHECK(rep.continuity == Catch::Approx(0.125).margin(1e-15));
    y.prehistory[0] += 0.5;
    CHECK(constraint_residuals(sys, mesh, y).prehistory == Catch::Approx(0.5).margin(1e-15));
    y.values[2].back() = -0.25;
    CHECK(constraint_residuals(sys, mesh, y).target == 0.25);
}

TEST_CASE("grid difference norm") {
    DelaySystem sys = instances::load("interval");
    Mesh coarse = build_mesh(sys, 2);
    Mesh fine = build_mesh(sys, 4);
    // truth in trial space: nested solutions coincide at shared nodes
    TreeFunction yc = solve_bvp(sys, coarse).y;
    TreeFunction yf = solve_bvp(sys, fine).y;
    CHECK(grid_difference_norm(coarse, yc, fine, yf) <= 1e-12);
    // a constant offset integrates to sqrt(T) * offset
    for (auto& v : yf.values[1]) v += 1.0;
    CHECK(grid_difference_norm(coarse, yc, fine, yf) ==
          Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(grid_difference_norm(fine, yf, coarse, yc), validation_error);
}

TEST_CASE("discrete W21 norms") {
    DelaySystem sys = instances::load("interval");
    Mesh mesh = build_mesh(sys, 2);
    TreeFunction y = TreeFunction::zeros(mesh);
    for (auto& v : y.values[1]) v = 2.0; // constant: norm^2 = 4*T
    CHECK(w21_norm(mesh, y) == Catch::Approx(std::sqrt(12.0)).epsilon(1e-14));
    for (auto& v : y.prehistory) v = 2.0;
    CHECK(w21_prehistory_norm(mesh, y) == Catch::Approx(2.0).epsilon(1e-14));
    // add slope 1 on [0,T]: integral of y'^2 adds T
    for (std::int64_t i = 0; i <= mesh.num_elems[1]; ++i)
        y.values[1][i] = static_cast<double>(i) * mesh.h;
    // integral of t^2 over [0,3] = 9, plus 3 from the slope
    CHECK(w21_norm(mesh, y) == Catch::Approx(std::sqrt(9.0 + 3.0)).epsilon(1e-14));
}
