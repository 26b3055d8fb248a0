#pragma once

#include <stdexcept>
#include <string>

namespace ownet {

// Error taxonomy mirrored by the CLI exit statuses. Every throw site picks
// one of the three categories below so callers can map failures to a stable
// machine-readable status string.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* status() const noexcept = 0;
};

// Bad input data or usage: parse failures, referential integrity,
// over-subscribed registers, unknown formats, missing coverage.
class InputError : public Error {
public:
    using Error::Error;
    const char* status() const noexcept override { return "input error"; }
};

// A documented precondition was violated by the caller (e.g. simulating a
// non-imputed graph, oracle register above the factorial guard).
class ContractError : public Error {
public:
    using Error::Error;
    const char* status() const noexcept override { return "contract error"; }
};

// Numerical failure, e.g. a flow iteration that cannot converge.
class NumericError : public Error {
public:
    using Error::Error;
    const char* status() const noexcept override { return "numeric error"; }
};

} // namespace ownet
