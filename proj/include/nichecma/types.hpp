#pragma once

#include <limits>

#include <Eigen/Dense>

namespace nichecma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned search box, identical bounds on every coordinate.
/// Infinite bounds disable bound handling.
struct Bounds
{
    double lower = -5.0;
    double upper = 5.0;

    static Bounds unbounded()
    {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    bool contains(const Vector& x) const { return (x.array() >= lower).all() && (x.array() <= upper).all(); }
    Vector clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

} // namespace nichecma
