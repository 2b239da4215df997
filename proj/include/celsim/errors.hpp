#pragma once

#include <stdexcept>
#include <string>

namespace cel {

// Invalid configuration or parameter input (CLI exit code 2).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string &msg) : std::invalid_argument(msg) {}
};

// Numerical solver failure: singular systems, non-convergence,
// step-size underflow (CLI exit code 3).
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Output file failure (CLI exit code 4).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace cel
