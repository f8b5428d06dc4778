#pragma once

#include <string>
#include <vector>

#include "graphdamp/graphdamp.hpp"

namespace instances {

inline std::string problem_path(const std::string& name) {
    return std::string(GRAPHDAMP_PROBLEMS_DIR) + "/" + name + ".json";
}

inline graphdamp::ProblemSpec load_spec(const std::string& name) {
    return graphdamp::parse_problem(problem_path(name));
}

inline graphdamp::DelaySystem load(const std::string& name) {
    return graphdamp::make_system(load_spec(name));
}

/// The fixed benchmark suite used by the cross-checking tests.
inline const std::vector<std::string>& suite() {
    static const std::vector<std::string> names = {
        "interval", "star", "path2_jump", "path2_bc", "bramble_mixed", "star_classical"};
    return names;
}

} // namespace instances
