#pragma once

#include <stdexcept>
#include <string>

namespace gwgl {

/// Bad input: wrong dimensions, invalid parameters, malformed files.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a usable answer (singular ratio,
/// infeasible program, every tuning fit failing).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gwgl
