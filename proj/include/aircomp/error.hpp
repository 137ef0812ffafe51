#pragma once

#include <stdexcept>
#include <string>

namespace aircomp {

enum class ErrorCode {
    InvalidDimension,
    DimensionMismatch,
    NonFinite,
    NoUncertainty,
    InvalidNoise,
    AllZeroScalers,
    PerturbationOutOfBall,
    InvalidArgument,
    InvalidConfig,
    Io,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidDimension: return "InvalidDimension";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NoUncertainty: return "NoUncertainty";
        case ErrorCode::InvalidNoise: return "InvalidNoise";
        case ErrorCode::AllZeroScalers: return "AllZeroScalers";
        case ErrorCode::PerturbationOutOfBall: return "PerturbationOutOfBall";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace aircomp
