#pragma once

#include <stdexcept>
#include <string>

namespace relent {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid values or malformed data: domain violations, shape mismatches,
// unparseable files.
struct invalid_input : error {
    explicit invalid_input(const std::string& what) : error(what) {}
};

// An iterative solver hit its iteration cap before reaching tolerance.
struct convergence_error : error {
    explicit convergence_error(const std::string& what) : error(what) {}
};

// The requested constraint set or target admits no solution.
struct infeasible_error : error {
    explicit infeasible_error(const std::string& what) : error(what) {}
};

}  // namespace relent
