#pragma once

#include <stdexcept>
#include <string>

namespace ionclock {

// Input outside the domain of a closed-form expression (non-positive
// frequency, wrong-sign polarisability, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Magic RF frequency / magic rotation requires a negative differential
// static polarisability.
class NoMagicFrequencyError : public DomainError {
public:
    using DomainError::DomainError;
};

// Two ions at (numerically) the same position.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation requires a particular trap geometry or input state.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Compensation beam polarisability has the wrong sign to cancel the RF shift.
class SignError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// Malformed or inconsistent configuration / input file.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scan grid does not bracket the quantity being searched for.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Time-domain integration blew up.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ionclock
