#pragma once

#include <stdexcept>
#include <string>

namespace ppvq {

/// Corrupt or truncated input on any decode path.
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

/// The state-transition chain has no unique stationary distribution.
class ReducibleChainError : public std::runtime_error {
public:
    explicit ReducibleChainError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ppvq
