#pragma once

#include <stdexcept>
#include <string>

namespace igp {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Density-matrix validation. Messages carry the violated bound and its
// observed magnitude.
struct NotHermitian : Error { using Error::Error; };
struct NotPositive : Error { using Error::Error; };
struct TraceNotOne : Error { using Error::Error; };

// Unitary / orthogonal / state-vector validation.
struct NotUnitary : Error { using Error::Error; };
struct NotOrthogonal : Error { using Error::Error; };
struct NormNotOne : Error { using Error::Error; };

struct DimensionMismatch : Error { using Error::Error; };
struct DimensionTooSmall : Error { using Error::Error; };

struct PurityOutOfRange : Error { using Error::Error; };
struct RadiusOutOfRange : Error { using Error::Error; };
struct PhaseConstraintViolated : Error { using Error::Error; };

struct NotSymmetricUnitary : Error { using Error::Error; };
struct FactorizationFailed : Error { using Error::Error; };

struct SamplerExhausted : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };

} // namespace igp
