#pragma once

#include <stdexcept>
#include <string>

namespace excursion {

/// Argument outside the mathematical domain of a closed-form quantity.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated a precondition (shape mismatch, empty sample count, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical construction failed (embedding, factorization, capacity).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace excursion
