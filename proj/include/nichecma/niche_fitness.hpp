#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nichecma/base_functions.hpp"
#include "nichecma/types.hpp"

namespace nichecma {

/// A multimodal landscape: one shifted, rotated and scaled base function per global minimum.
struct NicheSet
{
    std::vector<Vector> positions;
    std::vector<double> hardness;
    std::vector<Matrix> rotations;
    std::vector<BaseFunction> base_fns;
    double niche_radius = 0.0;
    double bias = 0.0;
    double sigma_w = 1.0; ///< kernel width in units of niche_radius

    std::size_t size() const noexcept { return positions.size(); }
    std::size_t dim() const noexcept { return positions.empty() ? 0 : static_cast<std::size_t>(positions.front().size()); }
};

using WeightVector = std::vector<double>;

/// Half the smallest pairwise Euclidean distance.
double niching_radius(std::span<const Vector> positions);

/// Normalized proximity weights of `x` with respect to every minimum.
///
/// raw_i = exp(-(d_i / (sigma_w * niche_radius))^2) / d_i^4, evaluated in log space.
/// The distance factor makes the weight of a minimum tend to 1 as x approaches it,
/// so f(X_i) carries no leakage from neighbouring basins. An exact hit
/// (d_i == 0) puts all weight on that minimum.
WeightVector niche_weights(const Vector& x, const NicheSet& niche);

using BaseEvaluator = std::function<double(BaseFunction, const Vector&)>;

/// bias + sum_i w_i(x) * H_i * g_i(R_i (x - X_i)).
double composite_fitness(const Vector& x, const NicheSet& niche);
double composite_fitness(const Vector& x, const NicheSet& niche, const BaseEvaluator& base);

/// Linear hardness schedule over 1-based minimum indices; min_h when there is a single minimum.
double hardness(std::size_t index, std::size_t n_minima, double min_h, double max_h);

} // namespace nichecma
