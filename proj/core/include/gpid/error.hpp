#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpid {

enum class ErrorCode {
    DimensionMismatch,
    NotSymmetric,
    NotPositiveSemidefinite,
    SingularMessageCovariance,
    DeterministicChannel,
    NumericalFailure,
    InsufficientSamples,
    DegenerateInformation,
    InfeasibleParameters,
    InvalidInput,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// front ends can map it to a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace gpid
