#pragma once

#include <stdexcept>
#include <string>

namespace ppmf {

// Numeric values are part of the C ABI (see include/ppmf/ppmf.h); keep in sync.
enum class ErrorCode : int {
    MalformedRow = 1,
    UnknownVariable = 2,
    OutOfWindow = 3,
    DuplicatePatient = 4,
    InvalidLabel = 5,
    MissingOutcome = 6,
    MissingEvents = 7,
    BadConfig = 8,
    EmptyCohort = 9,
    DimensionMismatch = 10,
    KTooLarge = 11,
    SingleClassCohort = 12,
    NegativeWeight = 13,
    TooFewPerClass = 14,
    TooFewPairs = 15,
    DegenerateMatrix = 16,
    BadSpec = 17,
    InvalidArgument = 18,
    Io = 100,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ppmf
