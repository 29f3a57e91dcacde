#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cvsat {

/// Argument outside the mathematical domain of an operation (eta > 1, chi < 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The input is in range but the computation cannot produce a trustworthy number
/// (unphysical CM, empty selection region, non-finite integrand).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by to_effective for CMs that satisfy the PPT criterion.
class NotEntangledError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Scenario parse / validation failure. `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace cvsat
