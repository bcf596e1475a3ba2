#pragma once

#include <stdexcept>
#include <string>

namespace lab {

// Requested construction would exceed a hard size/memory guard.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A simulation produced a non-finite state.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step) : std::runtime_error(what), step(step) {}
    long step;
};

// A certified property failed at runtime (indicates an implementation bug).
struct ConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

// Configuration file rejected.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(what), line(line), column(column) {}
    int line;
    int column;
};

}  // namespace lab
