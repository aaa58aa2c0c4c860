#pragma once

#include <stdexcept>
#include <string>

namespace probrobust {

/// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (bad weight, zero vector, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A vector hypothesis was fed an abstract point, or the other way round.
class DomainMismatch : public Error {
public:
    using Error::Error;
};

/// Exact arithmetic would leave the 64-bit range.
class RationalOverflow : public Error {
public:
    using Error::Error;
};

/// Enumeration would exceed the configured hypothesis-evaluation budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

/// The requested loss/adversary combination has no well-defined evaluation.
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

/// Malformed input text (rational literal, loss grammar, JSON artifact).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace probrobust
