#pragma once

#include <stdexcept>
#include <string>

namespace nmep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVector : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NotHermitian : Error { using Error::Error; };
struct EmptyEnsemble : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct NegativeRate : Error { using Error::Error; };
struct ReverseTargetMissing : Error { using Error::Error; };
struct NonMonotonicTimes : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct OutOfTableRange : Error { using Error::Error; };
struct InvalidExponent : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace nmep
