#pragma once

#include <stdexcept>
#include <string>

namespace facets {

/// Malformed or unreadable input (files, headers, schemas).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative numeric routine failed to make progress.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Contract checks (dimension mismatches, invalid arguments).
inline void check(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace facets
