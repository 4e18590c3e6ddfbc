#pragma once

#include <optional>
#include <string_view>

#include "nichecma/types.hpp"

namespace nichecma {

/// The eight base landscapes placed around each global minimum.
/// Every one is shifted so that g(0) == 0 exactly and g >= 0.
enum class BaseFunction
{
    elliptic,
    diff_powers,
    schwefel12_skewed,
    rosenbrock,
    ackley_skewed,
    rastrigin,
    weierstrass_pen,
    schwefel226_pen,
};

std::string_view to_string(BaseFunction fn) noexcept;
std::optional<BaseFunction> parse_base_function(std::string_view name) noexcept;

inline constexpr double kDefaultSkew = 0.2;

/// Asymmetry map fixing the origin: positive coordinates are raised to
/// 1 + beta * (i-1)/(n-1) * sqrt(z_i); non-positive ones pass through.
Vector skew_transform(const Vector& z, double beta = kDefaultSkew);

/// Quadratic exterior penalty, 100 * sum(max(0, |x_i| - 5)^2) for the default box.
double boundary_penalty(const Vector& x, const Bounds& bounds = {});

/// Evaluates g(z) for the given base function.
double base_eval(BaseFunction fn, const Vector& z);

/// Same, by integer id (0-based enum order). Throws unknown_function for out-of-range ids.
double base_eval(int fn_id, const Vector& z);

} // namespace nichecma
