#pragma once

#include <stdexcept>
#include <string>

namespace otdro {

// Base of every exception thrown by the library. The CLI maps the concrete
// type onto a process exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data: malformed files, contract violations on
// arguments, empty training sets.
class DataError : public Error {
public:
    using Error::Error;
};

// A configuration document violates its schema or a documented range.
class ConfigError : public DataError {
public:
    ConfigError(std::string field, const std::string& message)
        : DataError("config field '" + field + "': " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// The LP solver failed (infeasible/unbounded where impossible, or numerics).
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace otdro
