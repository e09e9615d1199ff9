#pragma once

#include <stdexcept>
#include <string>

namespace ncbateman {

/// Rejected physical input (negative theta, non-finite values, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quantity left the domain where it is defined (imaginary mass in a
/// real-only route, degenerate rotation, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A formula hit a zero denominator (eta = +-1, vanishing bracket denominator).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace ncbateman
