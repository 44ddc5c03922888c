#include "bre/errors.hpp"

namespace bre {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::InvalidEstimate: return "InvalidEstimate";
    case ErrorKind::InsufficientSample: return "InsufficientSample";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::ZeroTrueParameter: return "ZeroTrueParameter";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InvalidGroup: return "InvalidGroup";
    case ErrorKind::RowWithoutData: return "RowWithoutData";
    case ErrorKind::NonConverged: return "NonConverged";
    case ErrorKind::InadmissibleForParam: return "InadmissibleForParam";
    case ErrorKind::ConditionDegenerate: return "ConditionDegenerate";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace bre
