#pragma once

#include <stdexcept>
#include <string>

namespace glpm {

// Error hierarchy maps onto the CLI exit codes:
//   validation_error -> 1, convergence_error -> 2, geometry_error -> 3.

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an evaluator.
struct domain_error : validation_error {
    using validation_error::validation_error;
};

struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A ball, competitor support, or slide path does not fit inside the grid box.
struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace glpm
