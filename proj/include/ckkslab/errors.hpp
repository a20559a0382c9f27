// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ckks {

enum class ErrorCode {
    NoPrimeFound,
    InvalidBitSize,
    InvalidDegree,
    FormMismatch,
    LevelMismatch,
    LevelExhausted,
    ScaleMismatch,
    ScaleOverflow,
    TooManySlots,
    MissingGaloisKey,
    MissingRelinKey,
    DegreeUnsupported,
    DimensionMismatch,
    DimensionTooLarge,
    ShadowUnavailable,
    NonFinite,
    LengthMismatch,
    ShapeMismatch,
    ConstantTarget,
    ConstantColumn,
    EmptyTestSet,
    NoAccumulatedGradients,
    IoError,
    MissingColumn,
    EmptyAfterCleaning,
    TooFewRows,
    UnknownPreset,
    UsageError,
    Internal,
};

const char* error_code_name(ErrorCode code);

class CkksError : public std::runtime_error {
public:
    CkksError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& what) {
    throw CkksError(code, what);
}

}  // namespace ckks
