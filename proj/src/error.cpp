#include "nichecma/error.hpp"

namespace nichecma {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind)
    {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::insufficient_population: return "insufficient-population";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::covariance_degenerate: return "covariance-degenerate";
    case ErrorKind::undefined_radius: return "undefined-radius";
    case ErrorKind::zero_radius: return "zero-radius";
    case ErrorKind::unknown_function: return "unknown-function";
    case ErrorKind::generation_failure: return "generation-failure";
    case ErrorKind::undefined_score: return "undefined-score";
    case ErrorKind::empty_budget: return "empty-budget";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    }
    return "unknown";
}

} // namespace nichecma
