#pragma once

#include <stdexcept>
#include <string>

namespace mdlinfer {

// Input-side failures (bad files, bad samples, bad configuration).
// The CLI maps these to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failures (optimizer could not make progress, etc.).
// The CLI maps these to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SampleTooSmall : InputError {
    using InputError::InputError;
};

struct ZeroVariance : InputError {
    using InputError::InputError;
};

struct DomainError : NumericError {
    using NumericError::NumericError;
};

struct OptimizerFailure : NumericError {
    using NumericError::NumericError;
};

struct EmptyAfterExclusion : NumericError {
    using NumericError::NumericError;
};

struct ParseError : InputError {
    using InputError::InputError;
};

struct GroupTooSmall : InputError {
    using InputError::InputError;
};

struct DuplicateFeatureId : InputError {
    using InputError::InputError;
};

struct NonPositiveAfterShift : InputError {
    using InputError::InputError;
};

struct AlreadyPreprocessed : InputError {
    using InputError::InputError;
};

struct IoError : InputError {
    using InputError::InputError;
};

}  // namespace mdlinfer
