#pragma once

#include <stdexcept>
#include <string>

namespace mscope {

/// Raised for malformed inputs, I/O failures and numerical degeneracies.
/// The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace mscope
