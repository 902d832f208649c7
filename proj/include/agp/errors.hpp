#pragma once

#include <stdexcept>
#include <string>

namespace agp {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input/data problems: missing files, ragged CSV rows, dimension mismatches.
struct DataError : Error {
    using Error::Error;
};

/// Numerical failures: degenerate kernel matrices, non-finite gradients,
/// failed factorizations.
struct NumericalError : Error {
    using Error::Error;
};

/// Cholesky factorization failed because the input is not SPD.
struct NotSpdError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace agp
