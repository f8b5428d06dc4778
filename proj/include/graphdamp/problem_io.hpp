#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphdamp/function.hpp"
#include "graphdamp/simulate.hpp"
#include "graphdamp/system.hpp"

namespace graphdamp {

/// One problem file: the tree in input order plus delay, coefficients and
/// prehistory. Edges keep the order of the file; canonical numbering happens
/// in build_tree and is recorded there.
struct ProblemSpec {
    struct Edge {
        int parent = 0;
        std::int64_t length_units = 1;
        double b = 0.0;
        double c = 0.0;
    };

    int schema = 1;
    std::string label;
    double unit = 1.0;
    std::int64_t tau_units = 1;
    std::vector<Edge> edges;
    Prehistory phi;
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const std::string& where,
                                   const char* key) {
    if (!j.contains(key)) throw validation_error(where + key + ": missing field");
    return j.at(key);
}

inline double number_field(const nlohmann::json& j, const std::string& where, const char* key) {
    const auto& v = field(j, where, key);
    if (!v.is_number()) throw validation_error(where + key + ": must be a number");
    return v.get<double>();
}

inline std::int64_t integer_field(const nlohmann::json& j, const std::string& where,
                                  const char* key) {
    const auto& v = field(j, where, key);
    if (!v.is_number_integer()) throw validation_error(where + key + ": must be an integer");
    return v.get<std::int64_t>();
}

inline std::vector<double> number_array_field(const nlohmann::json& j, const std::string& where,
                                              const char* key) {
    const auto& v = field(j, where, key);
    if (!v.is_array() || v.empty())
        throw validation_error(where + key + ": must be a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw validation_error(where + key + "[" + std::to_string(i) + "]: must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

} // namespace detail

inline ProblemSpec problem_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("problem file: top level must be an object");
    ProblemSpec spec;

    if (detail::integer_field(j, "", "schema") != 1)
        throw validation_error("schema: unsupported value, expected 1");
    if (j.contains("label")) {
        if (!j.at("label").is_string()) throw validation_error("label: must be a string");
        spec.label = j.at("label").get<std::string>();
    }

    spec.unit = j.contains("unit") ? detail::number_field(j, "", "unit") : 1.0;
    if (!(spec.unit > 0.0)) throw validation_error("unit: must be a positive number");

    spec.tau_units = detail::integer_field(j, "", "tau_units");
    if (spec.tau_units < 1) throw validation_error("tau_units: must be a positive integer");

    const auto& edges = detail::field(j, "", "edges");
    if (!edges.is_array() || edges.empty())
        throw validation_error("edges: must be a non-empty array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = "edges[" + std::to_string(i) + "].";
        const auto& ej = edges[i];
        if (!ej.is_object()) throw validation_error("edges[" + std::to_string(i) + "]: must be an object");
        ProblemSpec::Edge e;
        const std::int64_t parent = detail::integer_field(ej, where, "parent");
        if (parent < 0 || parent > static_cast<std::int64_t>(edges.size()))
            throw validation_error(where + "parent: must name the root (0) or an edge index");
        e.parent = static_cast<int>(parent);
        e.length_units = detail::integer_field(ej, where, "length_units");
        if (e.length_units < 1)
            throw validation_error(where + "length_units: must be a positive integer");
        if (ej.contains("b")) e.b = detail::number_field(ej, where, "b");
        if (ej.contains("c")) e.c = detail::number_field(ej, where, "c");
        spec.edges.push_back(e);
    }

    const auto& pre = detail::field(j, "", "prehistory");
    if (!pre.is_object()) throw validation_error("prehistory: must be an object");
    const auto& kind = detail::field(pre, "prehistory.", "kind");
    if (!kind.is_string()) throw validation_error("prehistory.kind: must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "polynomial") {
        spec.phi = Prehistory::polynomial(detail::number_array_field(pre, "prehistory.", "coeffs"));
    } else if (k == "samples") {
        spec.phi = Prehistory::from_samples(detail::number_array_field(pre, "prehistory.", "values"));
    } else {
        throw validation_error("prehistory.kind: must be \"polynomial\" or \"samples\"");
    }
    return spec;
}

inline nlohmann::json problem_to_json(const ProblemSpec& spec) {
    nlohmann::json j;
    j["schema"] = spec.schema;
    if (!spec.label.empty()) j["label"] = spec.label;
    j["unit"] = spec.unit;
    j["tau_units"] = spec.tau_units;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : spec.edges)
        j["edges"].push_back({{"parent", e.parent},
                              {"length_units", e.length_units},
                              {"b", e.b},
                              {"c", e.c}});
    if (spec.phi.kind == Prehistory::Kind::polynomial)
        j["prehistory"] = {{"kind", "polynomial"}, {"coeffs", spec.phi.coeffs}};
    else
        j["prehistory"] = {{"kind", "samples"}, {"values", spec.phi.samples}};
    return j;
}

inline ProblemSpec parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error(path + ": cannot open problem file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error(path + ": " + e.what());
    }
    return problem_from_json(j);
}

inline void write_problem(const std::string& path, const ProblemSpec& spec) {
    std::ofstream out(path);
    if (!out) throw validation_error(path + ": cannot write problem file");
    out << problem_to_json(spec).dump(2) << "\n";
}

/// Canonicalize the tree and carry the per-edge coefficients along with the
/// renumbering.
inline DelaySystem make_system(const ProblemSpec& spec) {
    std::vector<int> parents;
    std::vector<std::int64_t> lengths;
    for (const auto& e : spec.edges) {
        parents.push_back(e.parent);
        lengths.push_back(e.length_units);
    }
    RootedTree tree = build_tree(parents, lengths);
    std::vector<double> b(tree.m + 1, 0.0);
    std::vector<double> c(tree.m + 1, 0.0);
    for (int j = 1; j <= tree.m; ++j) {
        b[j] = spec.edges[tree.input_index[j] - 1].b;
        c[j] = spec.edges[tree.input_index[j] - 1].c;
    }
    return make_system(std::move(tree), spec.tau_units, spec.unit, std::move(b), std::move(c),
                       spec.phi);
}

/// input edge id -> canonical edge index.
inline std::vector<int> canonical_of_input(const RootedTree& tree) {
    std::vector<int> inv(tree.m + 1, 0);
    for (int j = 1; j <= tree.m; ++j) inv[tree.input_index[j]] = j;
    return inv;
}

inline std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// solution.csv: one row per node in input-edge order. u is broken-linear,
/// so each node carries its left and right limits; the two one-sided limits
/// coincide only where u happens to be continuous. With nodal averaging both
/// columns hold the average (plot-friendly, no longer bit-exact).
inline void write_solution_csv(const std::string& path, const DelaySystem& sys, const Mesh& mesh,
                               const TreeFunction& y, const BrokenLinear& u,
                               bool resample_nodal = false) {
    require_matches(mesh, y);
    require_matches(mesh, u);
    std::ofstream out(path);
    if (!out) throw validation_error(path + ": cannot write");
    out << "edge,t,y,u_left,u_right\n";
    const std::vector<int> canon = canonical_of_input(sys.tree);
    for (int e = 1; e <= sys.tree.m; ++e) {
        const int j = canon[e];
        const std::int64_t n = mesh.num_elems[j];
        for (std::int64_t i = 0; i <= n; ++i) {
            double ul = i > 0 ? u.elems[j][i - 1].right : u.elems[j][0].left;
            double ur = i < n ? u.elems[j][i].left : u.elems[j][n - 1].right;
            if (resample_nodal) ul = ur = 0.5 * (ul + ur);
            out << e << ',' << format_float(static_cast<double>(i) * mesh.h) << ','
                << format_float(y.values[j][i]) << ',' << format_float(ul) << ','
                << format_float(ur) << '\n';
        }
    }
}

/// trajectory.csv: nodal values only, prehistory included as negative-t rows
/// of the first edge.
inline void write_trajectory_csv(const std::string& path, const DelaySystem& sys, const Mesh& mesh,
                                 const TreeFunction& y) {
    require_matches(mesh, y);
    std::ofstream out(path);
    if (!out) throw validation_error(path + ": cannot write");
    out << "edge,t,y\n";
    const std::vector<int> canon = canonical_of_input(sys.tree);
    for (int e = 1; e <= sys.tree.m; ++e) {
        const int j = canon[e];
        if (j == 1)
            for (std::int64_t p = 0; p < mesh.n_tau; ++p)
                out << e << ',' << format_float(static_cast<double>(p - mesh.n_tau) * mesh.h) << ','
                    << format_float(y.prehistory[p]) << '\n';
        for (std::int64_t i = 0; i <= mesh.num_elems[j]; ++i)
            out << e << ',' << format_float(static_cast<double>(i) * mesh.h) << ','
                << format_float(y.values[j][i]) << '\n';
    }
}

/// Control file for the forward run: either a bare control.csv
/// (edge,t,u_left,u_right) or a full solution.csv; rows must cover every
/// node of the problem grid.
inline BrokenLinear read_control_csv(const std::string& path, const DelaySystem& sys,
                                     const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) throw validation_error(path + ": cannot open control file");
    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": empty control file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    int col_left;
    if (line == "edge,t,u_left,u_right")
        col_left = 2;
    else if (line == "edge,t,y,u_left,u_right")
        col_left = 3;
    else
        throw validation_error(path + ": unrecognized control file header");

    struct Row {
        double t, left, right;
    };
    std::vector<std::vector<Row>> rows(sys.tree.m + 1);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != col_left + 2)
            throw validation_error(path + ":" + std::to_string(lineno) + ": wrong column count");
        try {
            const int e = std::stoi(cells[0]);
            if (e < 1 || e > sys.tree.m)
                throw validation_error(path + ":" + std::to_string(lineno) + ": unknown edge id");
            rows[e].push_back({std::stod(cells[1]), std::stod(cells[col_left]),
                               std::stod(cells[col_left + 1])});
        } catch (const validation_error&) {
            throw;
        } catch (const std::exception&) {
            throw validation_error(path + ":" + std::to_string(lineno) + ": malformed number");
        }
    }

    const std::vector<int> canon = canonical_of_input(sys.tree);
    BrokenLinear u = BrokenLinear::zeros(mesh);
    for (int e = 1; e <= sys.tree.m; ++e) {
        const int j = canon[e];
        auto& r = rows[e];
        if (static_cast<std::int64_t>(r.size()) != mesh.num_elems[j] + 1)
            throw validation_error(path + ": control file does not match the problem grid");
        std::sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
        for (std::int64_t i = 0; i <= mesh.num_elems[j]; ++i)
            if (std::abs(r[i].t - static_cast<double>(i) * mesh.h) > 1e-9 * std::max(1.0, sys.edge_length(j)))
                throw validation_error(path + ": control file does not match the problem grid");
        for (std::int64_t p = 0; p < mesh.num_elems[j]; ++p) {
            u.elems[j][p].left = r[p].right;
            u.elems[j][p].right = r[p + 1].left;
        }
    }
    return u;
}

/// Damping maxima keyed by input edge id (boundary edges only).
inline nlohmann::json damping_to_json(const DelaySystem& sys, const Mesh& mesh,
                                      const TreeFunction& y) {
    const std::vector<double> damp = verify_damping(y, mesh);
    nlohmann::json out = nlohmann::json::object();
    for (int j = mesh.tree.d + 1; j <= mesh.tree.m; ++j)
        out[std::to_string(sys.tree.input_index[j])] = damp[j];
    return out;
}

} // namespace graphdamp
