#pragma once

#include <stdexcept>
#include <string>

namespace eldro {

/// Precondition violation on an argument (bad probability, negative radius, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// The standardized loss field is undefined: zero sample variance, or a
/// correlation matrix that cannot be factorized even after jitter.
class DegenerateFieldError : public std::runtime_error {
public:
    explicit DegenerateFieldError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver failed to converge or produced a non-finite value.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eldro
