#pragma once

#include <stdexcept>
#include <string>

namespace ocq {

/// Bad input from a caller: malformed scenario, violated precondition.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed or a physics invariant did not hold.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ocq
