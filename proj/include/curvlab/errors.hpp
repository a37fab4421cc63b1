#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

/// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Jets combined in one expression must share base point and order.
struct JetMismatch : Error {
    using Error::Error;
};

/// Division by a jet whose value part is at machine scale.
struct DivisionByZeroJet : Error {
    using Error::Error;
};

/// sqrt/pow of a jet whose value part is not strictly positive.
struct NonPositiveBase : Error {
    using Error::Error;
};

/// A derivative was requested beyond the jet order budget.
struct OrderExhausted : Error {
    using Error::Error;
};

/// Tensor dimensions, ranks or slots do not match the operation.
struct ShapeError : Error {
    using Error::Error;
};

/// Family or frame parameters violate their documented domain.
struct InvalidParams : Error {
    using Error::Error;
};

/// The trace-convention self-test failed; the build is miscompiled
/// or a sign convention drifted somewhere upstream.
struct ConventionError : Error {
    using Error::Error;
};

/// An audit identity was requested outside its hypotheses.
struct PreconditionNotMet : Error {
    using Error::Error;
};

/// Specialization of PreconditionNotMet for identities that require
/// constant scalar curvature.
struct NotConstantScalar : PreconditionNotMet {
    using PreconditionNotMet::PreconditionNotMet;
};

} // namespace curvlab
