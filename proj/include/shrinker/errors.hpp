#pragma once

#include <stdexcept>
#include <string>

namespace shrinker {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// dF lost rank at a grid point, so the chart is not an immersion there.
class DegenerateImmersionError : public Error {
public:
    using Error::Error;
};

/// Induced metric is not invertible at an interior point.
class DegenerateMetricError : public Error {
public:
    using Error::Error;
};

/// A computation needs derivative depth the chart does not carry.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Invalid user-facing configuration (unknown example, bad parameters, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE integration lost control of the conserved quantity.
class IntegratorError : public Error {
public:
    using Error::Error;
};

/// k e^{-k^2/2} = c has no solution.
class NoRootError : public Error {
public:
    using Error::Error;
};

/// A quadrature or statistic is undefined because every point is masked.
class MaskedError : public Error {
public:
    using Error::Error;
};

/// Mean curvature flow monitor did not show blow-up.
class NoBlowupError : public Error {
public:
    using Error::Error;
};

/// A flow step produced non-finite positions.
class BlowupReached : public Error {
public:
    using Error::Error;
};

}  // namespace shrinker
