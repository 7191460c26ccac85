// Exception taxonomy shared across the library. The CLI maps these to
// process exit codes, so keep the hierarchy flat and explicit.
#pragma once

#include <stdexcept>
#include <string>

namespace rsnell {

/// Input file or data-model violation (parse failure, broken invariant).
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (solver breakdown, non-convergence treated as fatal).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// One-step arbitrage: zero lies outside the convex hull of the price
/// increments at some node, so the hedging LP is unbounded below.
class ArbitrageError : public std::runtime_error {
public:
    ArbitrageError(const std::string& msg, std::string node)
        : std::runtime_error(msg), node_id(std::move(node)) {}
    std::string node_id;
};

/// Brute-force enumeration would exceed the configured work cap.
class CapExceededError : public std::runtime_error {
public:
    explicit CapExceededError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A structural guarantee failed at runtime; indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace rsnell
