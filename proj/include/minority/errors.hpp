#pragma once

#include <stdexcept>
#include <string>

namespace minority {

/// Argument outside the mathematical domain of a kernel (negative mean, r > n, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A root search or summation could not meet its contract.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid simulation or run configuration. `key()` names the offending setting.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Caller asked for something the inputs cannot provide (e.g. C(tau) without a choice record).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace minority
