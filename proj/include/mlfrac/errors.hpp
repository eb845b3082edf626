#pragma once

#include <stdexcept>
#include <string>

namespace mlfrac {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Argument inside the domain, but outside the range where the evaluation
/// strategy can certify its tolerance (or the result is not representable).
class RangeError : public std::range_error {
public:
    explicit RangeError(const std::string& what) : std::range_error(what) {}
};

/// Grid too coarse for the requested scheme.
class InsufficientResolution : public std::invalid_argument {
public:
    explicit InsufficientResolution(const std::string& what) : std::invalid_argument(what) {}
};

/// Input violates a documented precondition (e.g. nonzero initial data).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mlfrac
