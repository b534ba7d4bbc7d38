#pragma once

#include <stdexcept>
#include <string>

namespace efeplan {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unknown axis name, duplicate axis, or axis-set mismatch on a table.
struct AxisError : Error {
    using Error::Error;
};

/// KL divergence requested between distributions violating absolute
/// continuity (p > 0 somewhere q == 0).
struct DivergenceUndefinedError : Error {
    using Error::Error;
};

/// Operation received an empty input where at least one element is required.
struct EmptyInputError : Error {
    using Error::Error;
};

/// Policy enumeration would exceed the configured cap.
struct PolicySpaceError : Error {
    using Error::Error;
};

/// Observation has zero probability under the predictive distribution.
struct ImpossibleObservationError : Error {
    using Error::Error;
};

/// A functional is undefined because a q-supported outcome has zero mass
/// under the reference measure (preference prior or generative model).
struct SupportViolationError : Error {
    using Error::Error;
};

/// Model or experiment file failed validation on load.
struct ModelLoadError : Error {
    using Error::Error;
};

/// Invalid or incomplete experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Brute-force reference computation would exceed its size cap.
struct OracleCapacityError : Error {
    using Error::Error;
};

/// Free energy became non-finite during constrained minimization sweeps.
struct SweepDivergenceError : Error {
    using Error::Error;
};

} // namespace efeplan
