#pragma once

#include <stdexcept>
#include <string>

namespace opmean {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A matrix failed the positive definiteness test.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// A scalar function was applied outside its declared domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the range of a representing function.
class RangeError : public Error {
public:
    using Error::Error;
};

class WeightError : public Error {
public:
    using Error::Error;
};

class UnknownMean : public Error {
public:
    using Error::Error;
};

/// The barycenter solver only handles means whose representing function maps onto (0, inf).
class NotSurjective : public Error {
public:
    using Error::Error;
};

class QuadratureStalled : public Error {
public:
    using Error::Error;
};

class NegativeRadicand : public Error {
public:
    using Error::Error;
};

} // namespace opmean
