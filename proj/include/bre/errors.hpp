#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bre {

enum class ErrorKind {
    EmptySample,
    InvalidEstimate,
    InsufficientSample,
    DegenerateDistribution,
    ZeroTrueParameter,
    NotPositiveDefinite,
    InvalidGroup,
    RowWithoutData,
    NonConverged,
    InadmissibleForParam,
    ConditionDegenerate,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace bre
