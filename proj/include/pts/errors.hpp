#pragma once

#include <stdexcept>
#include <string>

namespace pts {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct DegenerateConfiguration : Error { using Error::Error; };
struct NoConsensus : Error { using Error::Error; };
struct PointAtInfinity : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };

// motion
struct EmptyMask : Error { using Error::Error; };
struct SingularInnovation : Error { using Error::Error; };

// region
struct NonPositiveExtent : Error { using Error::Error; };

// matcher
struct ZeroVarianceTemplate : Error { using Error::Error; };
struct TemplateLargerThanPatch : Error { using Error::Error; };

// pipeline
struct BoxOutOfBounds : Error { using Error::Error; };
struct NotInitialized : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

// data / synth
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct SpecError : Error { using Error::Error; };

} // namespace pts
