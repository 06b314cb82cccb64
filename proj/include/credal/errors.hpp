#pragma once

#include <stdexcept>
#include <string>

namespace credal {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

// Malformed input: unknown nodes, bad files, invalid paths, empty events.
class InputError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Inconsistent model: empty credal sets, infeasible programs, failed validation.
class ModelError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// The problem exceeds a documented size bound.
class CapabilityError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// A reduction was invoked without its hypotheses holding.
class HypothesisError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

class ConvergenceError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

} // namespace credal
