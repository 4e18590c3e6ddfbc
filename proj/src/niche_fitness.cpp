#include "nichecma/niche_fitness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nichecma/error.hpp"

namespace nichecma {

namespace {

// The d^-4 factor flattens the neighbours' share near a minimum to O(d^4); with d^-1
// an ill-conditioned neighbour left a steep cone around X_i.
constexpr double kDistancePower = 4.0;

void weights_from_distances(std::span<const double> dist, double width, WeightVector& w)
{
    w.assign(dist.size(), 0.0);

    const auto hit = std::find(dist.begin(), dist.end(), 0.0);
    if (hit != dist.end())
    {
        w[static_cast<std::size_t>(hit - dist.begin())] = 1.0;
        return;
    }

    std::vector<double> log_raw(dist.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dist.size(); ++i)
    {
        const double r = dist[i] / width;
        log_raw[i] = -r * r - kDistancePower * std::log(dist[i]);
        top = std::max(top, log_raw[i]);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
    {
        w[i] = std::exp(log_raw[i] - top);
        total += w[i];
    }
    // the maximizing term contributes exactly 1, so total >= 1 and never underflows
    for (auto& v : w)
        v /= total;
}

template <typename Eval>
double composite(const Vector& x, const NicheSet& niche, Eval&& eval)
{
    const std::size_t k = niche.size();
    std::vector<Vector> offsets(k);
    std::vector<double> dist(k);
    for (std::size_t i = 0; i < k; ++i)
    {
        offsets[i] = x - niche.positions[i];
        dist[i] = offsets[i].norm();
    }

    WeightVector w;
    weights_from_distances(dist, niche.sigma_w * niche.niche_radius, w);

    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i)
    {
        if (w[i] == 0.0)
            continue;
        const double g = eval(niche.base_fns[i], niche.rotations[i] * offsets[i]);
        if (!std::isfinite(g))
            throw Error(ErrorKind::numeric, "non-finite base value at minimum " + std::to_string(i));
        sum += w[i] * niche.hardness[i] * g;
    }
    return niche.bias + sum;
}

} // namespace

double niching_radius(std::span<const Vector> positions)
{
    if (positions.size() < 2)
        throw Error(ErrorKind::undefined_radius, "niching radius needs at least two positions");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            best = std::min(best, (positions[i] - positions[j]).norm());
    if (best == 0.0)
        throw Error(ErrorKind::zero_radius, "duplicate positions give a zero niching radius");
    return best / 2.0;
}

WeightVector niche_weights(const Vector& x, const NicheSet& niche)
{
    std::vector<double> dist(niche.size());
    for (std::size_t i = 0; i < niche.size(); ++i)
        dist[i] = (x - niche.positions[i]).norm();
    WeightVector w;
    weights_from_distances(dist, niche.sigma_w * niche.niche_radius, w);
    return w;
}

double composite_fitness(const Vector& x, const NicheSet& niche)
{
    return composite(x, niche, [](BaseFunction fn, const Vector& z) { return base_eval(fn, z); });
}

double composite_fitness(const Vector& x, const NicheSet& niche, const BaseEvaluator& base)
{
    return composite(x, niche, base);
}

double hardness(std::size_t index, std::size_t n_minima, double min_h, double max_h)
{
    if (min_h > max_h)
        throw Error(ErrorKind::invalid_argument, "min hardness exceeds max hardness");
    if (n_minima <= 1)
        return min_h;
    if (index < 1 || index > n_minima)
        throw Error(ErrorKind::invalid_argument, "hardness index out of range");
    const double t = static_cast<double>(index - 1) / static_cast<double>(n_minima - 1);
    return t * (max_h - min_h) + min_h;
}

} // namespace nichecma
