#pragma once

#include <stdexcept>
#include <string>

namespace hbc {

enum class ErrorCode {
    InvalidBand,
    BadWindow,
    RateTooLow,
    IncompatibleRate,
    InvalidConfig,
    NonIntegralBitPeriod,
    BadDropout,
    LengthMismatch,
    NotUidFrame,
    Truncated,
    NonMonotonicTime,
    InvalidReading,
    Format,
    Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace hbc
