#pragma once

#include <stdexcept>
#include <string>

namespace nichecma {

enum class ErrorKind
{
    invalid_dimension,
    invalid_argument,
    insufficient_population,
    numeric,
    covariance_degenerate,
    undefined_radius,
    zero_radius,
    unknown_function,
    generation_failure,
    undefined_score,
    empty_budget,
    io,
    parse,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace nichecma
