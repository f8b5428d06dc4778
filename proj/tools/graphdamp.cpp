// Command-line driver: solve / simulate / check / oracle / convergence on a
// JSON problem file. Exit codes: 0 ok, 1 invalid input, 2 numerical failure,
// 3 tolerance gate breached.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphdamp/graphdamp.hpp"

namespace gd = graphdamp;
using nlohmann::json;

namespace {

struct Options {
    std::string problem;
    std::string out = ".";
    std::string resample;
    int refine = 4;
    int levels = 4;
    double tol = 1e-8;
};

double elapsed_ms(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from)
        .count();
}

std::string out_path(const Options& opt, const char* name) {
    std::filesystem::create_directories(opt.out);
    return (std::filesystem::path(opt.out) / name).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw gd::validation_error(path + ": cannot write");
    out << j.dump(2) << "\n";
}

json vertex_map(const gd::DelaySystem& sys, const std::vector<double>& per_vertex) {
    // keyed by the input id of the edge that ends at the vertex
    json out = json::object();
    for (std::size_t i = 0; i < per_vertex.size(); ++i)
        out[std::to_string(sys.tree.input_index[i + 1])] = per_vertex[i];
    return out;
}

json edge_map(const gd::DelaySystem& sys, const std::vector<double>& per_edge) {
    json out = json::object();
    for (std::size_t i = 0; i < per_edge.size(); ++i)
        out[std::to_string(sys.tree.input_index[i + 1])] = per_edge[i];
    return out;
}

json base_report(const gd::ProblemSpec& spec, const gd::DelaySystem& sys, const gd::Mesh& mesh,
                 const gd::SolveResult& res, double solve_ms) {
    json rep;
    if (!spec.label.empty()) rep["label"] = spec.label;
    rep["refine"] = mesh.refine;
    rep["h"] = mesh.h;
    rep["n_free"] = mesh.n_free;
    rep["J"] = res.energy;
    rep["weak_residual"] = gd::weak_residual(sys, mesh, res.y);
    rep["kirchhoff_residual"] = vertex_map(sys, gd::kirchhoff_residual(sys, mesh, res.y));
    rep["damping"] = gd::damping_to_json(sys, mesh, res.y);
    rep["solver"] = {{"method", res.used_fallback ? "cg" : "cholesky"},
                     {"cg_iterations", res.cg_iterations},
                     {"gram_condition_hint", res.gram_condition_hint}};
    rep["timings"] = {{"solve_ms", solve_ms}};
    if (sys.tree.relabelled()) {
        json order = json::array();
        for (int j = 1; j <= sys.tree.m; ++j) order.push_back(sys.tree.input_index[j]);
        rep["input_order"] = order;
    }
    return rep;
}

int cmd_solve(const Options& opt, bool full_check) {
    const gd::ProblemSpec spec = gd::parse_problem(opt.problem);
    const gd::DelaySystem sys = gd::make_system(spec);
    const gd::Mesh mesh = gd::build_mesh(sys, opt.refine);

    const auto t0 = std::chrono::steady_clock::now();
    const gd::SolveResult res = gd::solve_bvp(sys, mesh);
    const double solve_ms = elapsed_ms(t0);

    json rep = base_report(spec, sys, mesh, res, solve_ms);
    gd::write_solution_csv(out_path(opt, "solution.csv"), sys, mesh, res.y, res.u,
                           opt.resample == "nodal");

    bool pass = true;
    if (full_check) {
        rep["strong_residual"] = edge_map(sys, gd::strong_residual(sys, mesh, res.y));
        const gd::ConstraintReport cons = gd::constraint_residuals(sys, mesh, res.y);
        rep["constraints"] = {{"continuity", cons.continuity},
                              {"prehistory", cons.prehistory},
                              {"target", cons.target}};
        const double scale = 1.0 + std::abs(res.energy);
        pass = rep["weak_residual"].get<double>() <= opt.tol * scale && cons.continuity <= 1e-12 &&
               cons.prehistory <= 1e-12 && cons.target <= 1e-12;
        for (const auto& kv : rep["damping"].items())
            pass = pass && kv.value().get<double>() <= opt.tol * scale;
        rep["tol"] = opt.tol;
        rep["pass"] = pass;
    }
    write_json(out_path(opt, "report.json"), rep);

    std::printf("J = %.17g   n_free = %lld   weak residual = %.3g\n", res.energy,
                static_cast<long long>(mesh.n_free), rep["weak_residual"].get<double>());
    std::printf("wrote %s and %s\n", out_path(opt, "solution.csv").c_str(),
                out_path(opt, "report.json").c_str());
    if (full_check && !pass) {
        std::fprintf(stderr, "check failed: residuals exceed tolerance %g\n", opt.tol);
        return 3;
    }
    return 0;
}

int cmd_simulate(const Options& opt) {
    const gd::ProblemSpec spec = gd::parse_problem(opt.problem);
    const gd::DelaySystem sys = gd::make_system(spec);
    const gd::Mesh mesh = gd::build_mesh(sys, opt.refine);

    std::string control = out_path(opt, "control.csv");
    if (!std::filesystem::exists(control)) control = out_path(opt, "solution.csv");
    if (!std::filesystem::exists(control))
        throw gd::validation_error(opt.out + ": no control.csv or solution.csv to simulate");
    const gd::BrokenLinear u = gd::read_control_csv(control, sys, mesh);

    const gd::TreeFunction y = gd::simulate(sys, mesh, u);
    gd::write_trajectory_csv(out_path(opt, "trajectory.csv"), sys, mesh, y);

    json rep;
    if (!spec.label.empty()) rep["label"] = spec.label;
    rep["refine"] = mesh.refine;
    rep["h"] = mesh.h;
    rep["control"] = control;
    rep["damping"] = gd::damping_to_json(sys, mesh, y);
    write_json(out_path(opt, "damping.json"), rep);

    double worst = 0.0;
    for (const auto& kv : rep["damping"].items())
        worst = std::max(worst, kv.value().get<double>());
    std::printf("max |y| over target windows = %.3g\n", worst);
    std::printf("wrote %s and %s\n", out_path(opt, "trajectory.csv").c_str(),
                out_path(opt, "damping.json").c_str());
    return 0;
}

int cmd_oracle(const Options& opt) {
    const gd::ProblemSpec spec = gd::parse_problem(opt.problem);
    const gd::DelaySystem sys = gd::make_system(spec);
    const gd::Mesh mesh = gd::build_mesh(sys, opt.refine);

    const gd::SolveResult res = gd::solve_bvp(sys, mesh);
    const gd::TreeFunction ref = gd::oracle_solve(sys, mesh);

    double max_diff = 0.0;
    for (int j = 1; j <= sys.tree.m; ++j)
        for (std::size_t i = 0; i < res.y.values[j].size(); ++i)
            max_diff = std::max(max_diff, std::abs(res.y.values[j][i] - ref.values[j][i]));
    const double j_oracle = gd::oracle_energy(sys, mesh, ref);
    const double dj = std::abs(res.energy - j_oracle);
    const bool pass = max_diff <= opt.tol && dj <= 1e-10 * (1.0 + std::abs(res.energy));

    json rep;
    if (!spec.label.empty()) rep["label"] = spec.label;
    rep["refine"] = mesh.refine;
    rep["n_free"] = mesh.n_free;
    rep["J_galerkin"] = res.energy;
    rep["J_oracle"] = j_oracle;
    rep["max_nodal_diff"] = max_diff;
    rep["delta_J"] = dj;
    rep["tol"] = opt.tol;
    rep["pass"] = pass;
    write_json(out_path(opt, "oracle.json"), rep);

    std::printf("max nodal |galerkin - oracle| = %.3g   |delta J| = %.3g\n", max_diff, dj);
    if (!pass) {
        std::fprintf(stderr, "oracle disagreement exceeds tolerance %g\n", opt.tol);
        return 3;
    }
    return 0;
}

int cmd_convergence(const Options& opt) {
    const gd::ProblemSpec spec = gd::parse_problem(opt.problem);
    const gd::DelaySystem sys = gd::make_system(spec);

    json levels = json::array();
    std::string csv = "refine,h,n_free,J,kirchhoff_max,strong_max,diff_norm\n";
    gd::Mesh prev_mesh;
    gd::TreeFunction prev_y;
    for (int k = 0; k < opt.levels; ++k) {
        const int refine = opt.refine << k;
        const gd::Mesh mesh = gd::build_mesh(sys, refine);
        const gd::SolveResult res = gd::solve_bvp(sys, mesh);

        double kirch = 0.0;
        for (double v : gd::kirchhoff_residual(sys, mesh, res.y)) kirch = std::max(kirch, v);
        double strong = 0.0;
        for (double v : gd::strong_residual(sys, mesh, res.y)) strong = std::max(strong, v);

        json level = {{"refine", refine},       {"h", mesh.h},
                      {"n_free", mesh.n_free},  {"J", res.energy},
                      {"kirchhoff_max", kirch}, {"strong_max", strong}};
        std::string diff_cell = "";
        if (k > 0) {
            const double diff = gd::grid_difference_norm(prev_mesh, prev_y, mesh, res.y);
            level["diff_norm"] = diff;
            diff_cell = gd::format_float(diff);
        }
        levels.push_back(level);
        csv += std::to_string(refine) + "," + gd::format_float(mesh.h) + "," +
               std::to_string(mesh.n_free) + "," + gd::format_float(res.energy) + "," +
               gd::format_float(kirch) + "," + gd::format_float(strong) + "," + diff_cell + "\n";
        std::printf("refine %3d: J = %.12g  kirchhoff = %.3e  strong = %.3e%s%s\n", refine,
                    res.energy, kirch, strong, k > 0 ? "  |y_h - y_h/2| = " : "",
                    k > 0 ? diff_cell.c_str() : "");
        prev_mesh = mesh;
        prev_y = res.y;
    }

    json rep;
    if (!spec.label.empty()) rep["label"] = spec.label;
    rep["levels"] = levels;
    write_json(out_path(opt, "convergence.json"), rep);
    std::ofstream out(out_path(opt, "convergence.csv"));
    out << csv;
    std::printf("wrote %s and %s\n", out_path(opt, "convergence.csv").c_str(),
                out_path(opt, "convergence.json").c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"damp a delayed control system on a rooted metric tree"};
    app.require_subcommand(1);
    Options opt;

    const auto add_common = [&](CLI::App* sub, bool with_tol) {
        sub->add_option("--problem", opt.problem, "problem file (JSON)")->required();
        sub->add_option("--refine", opt.refine, "grid refinements per unit length")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", opt.out, "output directory");
        if (with_tol) sub->add_option("--tol", opt.tol, "gate tolerance");
        return sub;
    };

    CLI::App* solve = add_common(app.add_subcommand("solve", "solve and write solution.csv"), false);
    solve->add_option("--resample", opt.resample, "emit node-averaged control")
        ->check(CLI::IsMember({"nodal"}));
    add_common(app.add_subcommand("simulate", "integrate forward with a given control"), false);
    CLI::App* check =
        add_common(app.add_subcommand("check", "solve plus full residual report"), true);
    check->add_option("--resample", opt.resample, "emit node-averaged control")
        ->check(CLI::IsMember({"nodal"}));
    add_common(app.add_subcommand("oracle", "cross-check against the brute-force minimizer"), true);
    CLI::App* conv =
        add_common(app.add_subcommand("convergence", "solve on a ladder of refinements"), false);
    conv->add_option("--levels", opt.levels, "number of refinement levels")
        ->check(CLI::Range(1, 12));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("solve")) return cmd_solve(opt, false);
        if (app.got_subcommand("simulate")) return cmd_simulate(opt);
        if (app.got_subcommand("check")) {
            if (!check->count("--tol")) opt.tol = 1e-10;
            return cmd_solve(opt, true);
        }
        if (app.got_subcommand("oracle")) return cmd_oracle(opt);
        if (app.got_subcommand("convergence")) return cmd_convergence(opt);
    } catch (const gd::numerical_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const gd::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
