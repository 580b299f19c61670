#pragma once

#include <stdexcept>
#include <string>

namespace epholo {

// Base class for every error this library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible (non-square, unequal dims, wrong vector length).
struct DimensionMismatch : Error {
    using Error::Error;
};

// A value contains NaN or Inf entries.
struct NonFinite : Error {
    using Error::Error;
};

// Eigenvalue gap below the exceptional-point threshold; the eigenbasis must not be inverted.
struct NearDegenerate : Error {
    using Error::Error;
};

// A metric/positivity check received a matrix that is not Hermitian within tolerance.
struct NotHermitian : Error {
    using Error::Error;
};

// Closed-form generators or the algebraic solver were evaluated at (or too close to)
// an exceptional point, where they are singular.
struct AtExceptionalPoint : Error {
    using Error::Error;
};

// The algebraic generator solver requires a time-independent Hamiltonian family.
struct NotTimeIndependent : Error {
    using Error::Error;
};

// An argument lies outside its documented domain.
struct DomainViolation : Error {
    using Error::Error;
};

// A transport path passes closer to an exceptional-point locus than the clearance allows.
struct PathThroughEP : Error {
    using Error::Error;
};

// The Richardson error estimate exceeded the requested integration tolerance.
struct StepTooCoarse : Error {
    using Error::Error;
};

// S^-1 U S is not diagonal within tolerance, so no scalar lambda trace exists.
struct NotDiagonalizedByS : Error {
    using Error::Error;
};

// The evolving metric lost positive-definiteness (smallest eigenvalue <= 0).
struct PositivityLost : Error {
    using Error::Error;
};

// Path concatenation with mismatched endpoints.
struct EndpointMismatch : Error {
    using Error::Error;
};

// A scenario/CLI configuration failed validation.
struct InvalidConfig : Error {
    using Error::Error;
};

}  // namespace epholo
