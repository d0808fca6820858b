#pragma once

#include <stdexcept>
#include <string>

namespace sdm {

/// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An observation or parameter lies outside its admissible set.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested score scaling is not available for the distribution.
class UnsupportedScaling : public Error {
public:
    using Error::Error;
};

/// Fisher information is singular or too ill-conditioned to invert.
class SingularInformation : public Error {
public:
    using Error::Error;
};

/// Data cannot identify a parameter (e.g. zero variance for a scale).
class DegenerateData : public Error {
public:
    using Error::Error;
};

/// The score-driven recursion left the representable range.
class FilterDivergence : public Error {
public:
    using Error::Error;
};

/// I - sum(B_j) is singular, so the unconditional mean does not exist.
class NonstationaryB : public Error {
public:
    using Error::Error;
};

/// Every optimizer start diverged or produced a non-finite objective.
class AllStartsFailed : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

/// A model specification violates one of its invariants.
class InvalidModel : public Error {
public:
    using Error::Error;
};

}  // namespace sdm
