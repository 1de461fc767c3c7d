#pragma once

#include <stdexcept>
#include <string>

namespace colsafe {

/// Violated precondition or malformed argument (dimension mismatch, empty set, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// LP/QP solver failed to converge or hit a numerical breakdown.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations)
        : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
          detail_(what),
          iterations_(iterations) {}

    int iterations() const noexcept { return iterations_; }
    /// Message without the iteration suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    int iterations_;
};

/// Invalid scenario document. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace colsafe
