#pragma once

#include <stdexcept>
#include <string>

namespace graphdamp {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input: malformed file, inconsistent shapes, out-of-range index.
struct validation_error : error {
    using error::error;
};

// The computation itself failed: lost positive definiteness, divergence.
struct numerical_error : error {
    using error::error;
};

} // namespace graphdamp
