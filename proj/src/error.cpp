#include "hbc/error.hpp"

namespace hbc {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::RateTooLow: return "RateTooLow";
    case ErrorCode::IncompatibleRate: return "IncompatibleRate";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonIntegralBitPeriod: return "NonIntegralBitPeriod";
    case ErrorCode::BadDropout: return "BadDropout";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotUidFrame: return "NotUidFrame";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::InvalidReading: return "InvalidReading";
    case ErrorCode::Format: return "Format";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace hbc
