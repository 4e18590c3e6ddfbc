#include "nichecma/base_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "nichecma/error.hpp"

namespace nichecma {

namespace {

constexpr std::array<std::string_view, 8> kNames = {
    "elliptic", "diff_powers", "schwefel12_skewed", "rosenbrock",
    "ackley_skewed", "rastrigin", "weierstrass_pen", "schwefel226_pen",
};

// (i-1)/(n-1) for 0-based i; 0 in one dimension.
double position_ratio(Eigen::Index i, Eigen::Index n)
{
    return n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
}

double elliptic(const Vector& z)
{
    const auto n = z.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        sum += std::pow(1e6, position_ratio(i, n)) * z[i] * z[i];
    return sum;
}

double diff_powers(const Vector& z)
{
    const auto n = z.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        sum += std::pow(std::abs(z[i]), 2.0 + 4.0 * position_ratio(i, n));
    return sum;
}

double schwefel12(const Vector& z)
{
    const Vector s = skew_transform(z);
    double partial = 0.0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
    {
        partial += s[i];
        sum += partial * partial;
    }
    return sum;
}

double rosenbrock(const Vector& z)
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < z.size(); ++i)
    {
        const double a = z[i] + 1.0;
        const double b = z[i + 1] + 1.0;
        sum += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    }
    return sum;
}

double ackley(const Vector& z)
{
    const Vector s = skew_transform(z);
    const double n = static_cast<double>(s.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : s)
    {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
    }
    // grouped so that the origin evaluates to exactly 0
    return (20.0 - 20.0 * std::exp(-0.2 * std::sqrt(sq / n))) + (std::numbers::e - std::exp(cs / n));
}

double rastrigin(const Vector& z)
{
    double sum = 0.0;
    for (double v : z)
        sum += v * v + 10.0 * (1.0 - std::cos(2.0 * std::numbers::pi * v));
    return sum;
}

constexpr int kWeierstrassTerms = 21; // k = 0..20
// Maps the [-5, 5] box onto the function's customary [-0.5, 0.5] domain, the same
// way the Schwefel 2.26 term maps it onto [-500, 500]. Unscaled, the sum is
// periodic with period 1 and has exact zeros on the integer lattice.
constexpr double kWeierstrassScale = 0.1;

struct WeierstrassTables
{
    std::array<double, kWeierstrassTerms> amplitude{};
    std::array<double, kWeierstrassTerms> frequency{};
    double origin_per_coordinate = 0.0;

    WeierstrassTables()
    {
        for (int k = 0; k < kWeierstrassTerms; ++k)
        {
            amplitude[k] = std::pow(0.5, k);
            frequency[k] = std::pow(3.0, k);
        }
        origin_per_coordinate = raw(0.0);
    }

    double raw(double v) const
    {
        double sum = 0.0;
        for (int k = 0; k < kWeierstrassTerms; ++k)
            sum += amplitude[k] * std::cos(2.0 * std::numbers::pi * frequency[k] * (v + 0.5));
        return sum;
    }
};

const WeierstrassTables& weierstrass_tables()
{
    static const WeierstrassTables tables;
    return tables;
}

double weierstrass(const Vector& z)
{
    const auto& t = weierstrass_tables();
    double sum = 0.0;
    for (double v : z)
        sum += t.raw(kWeierstrassScale * v) - t.origin_per_coordinate;
    return std::max(0.0, sum) + boundary_penalty(z);
}

constexpr double kSchwefelOffset = 4.209687462275036e+002;

// Per-coordinate term of the CEC-style modified Schwefel 2.26 on s = 100 z + offset.
// Coordinates beyond +-500 are folded back with a quadratic surcharge so the
// optimum stays at s = offset. The constant 418.9829 n cancels in g(z) - g(0).
double schwefel226_term(double v, double n)
{
    const double s = 100.0 * v + kSchwefelOffset;
    if (s > 500.0)
    {
        const double folded = 500.0 - std::fmod(s, 500.0);
        const double excess = (s - 500.0) / 100.0;
        return -folded * std::sin(std::sqrt(folded)) + excess * excess / n;
    }
    if (s < -500.0)
    {
        const double folded = -500.0 + std::fmod(std::abs(s), 500.0);
        const double excess = (s + 500.0) / 100.0;
        return -folded * std::sin(std::sqrt(500.0 - std::fmod(std::abs(s), 500.0))) + excess * excess / n;
    }
    return -s * std::sin(std::sqrt(std::abs(s)));
}

double schwefel226(const Vector& z)
{
    const double n = static_cast<double>(z.size());
    const double origin = schwefel226_term(0.0, n);
    double sum = 0.0;
    for (double v : z)
        sum += schwefel226_term(v, n) - origin;
    return std::max(0.0, sum) + boundary_penalty(z);
}

} // namespace

std::string_view to_string(BaseFunction fn) noexcept
{
    return kNames[static_cast<std::size_t>(fn)];
}

std::optional<BaseFunction> parse_base_function(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name)
            return static_cast<BaseFunction>(i);
    return std::nullopt;
}

Vector skew_transform(const Vector& z, double beta)
{
    const auto n = z.size();
    Vector out = z;
    for (Eigen::Index i = 0; i < n; ++i)
        if (z[i] > 0.0)
            out[i] = std::pow(z[i], 1.0 + beta * position_ratio(i, n) * std::sqrt(z[i]));
    return out;
}

double boundary_penalty(const Vector& x, const Bounds& bounds)
{
    double sum = 0.0;
    for (double v : x)
    {
        const double excess = std::max({0.0, v - bounds.upper, bounds.lower - v});
        sum += excess * excess;
    }
    return 100.0 * sum;
}

double base_eval(BaseFunction fn, const Vector& z)
{
    switch (fn)
    {
    case BaseFunction::elliptic: return elliptic(z);
    case BaseFunction::diff_powers: return diff_powers(z);
    case BaseFunction::schwefel12_skewed: return schwefel12(z);
    case BaseFunction::rosenbrock: return rosenbrock(z);
    case BaseFunction::ackley_skewed: return ackley(z);
    case BaseFunction::rastrigin: return rastrigin(z);
    case BaseFunction::weierstrass_pen: return weierstrass(z);
    case BaseFunction::schwefel226_pen: return schwefel226(z);
    }
    throw Error(ErrorKind::unknown_function, "unknown base function");
}

double base_eval(int fn_id, const Vector& z)
{
    if (fn_id < 0 || fn_id >= static_cast<int>(kNames.size()))
        throw Error(ErrorKind::unknown_function, "unknown base function id " + std::to_string(fn_id));
    return base_eval(static_cast<BaseFunction>(fn_id), z);
}

} // namespace nichecma
