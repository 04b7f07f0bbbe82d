#pragma once

#include <stdexcept>
#include <string>

namespace mbang {

// Exit codes used by the command-line tool.
enum class ExitCode : int {
    ok = 0,
    usage = 2,
    validation = 3,
    numerical = 4,
};

/// Bad arguments supplied by a caller (wrong tuple length, n = 0, ...).
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input data violates a structural invariant or a file schema.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine cannot produce a value (unsupported cumulant order,
/// zero-variance row, missing moment, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mbang
