#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nichecma/base_functions.hpp"
#include "nichecma/niche_fitness.hpp"
#include "nichecma/rng.hpp"
#include "nichecma/types.hpp"

namespace nichecma {

enum class Group
{
    A,
    B,
};

char to_char(Group g) noexcept;

struct ProblemSpec
{
    int problem_id = 1;
    Group group = Group::A;
    BaseFunction base_fn = BaseFunction::elliptic;
    std::size_t n_minima = 20;
    std::size_t dim = 2;
    std::size_t instance = 1;
    double table_f_star = 0.0; ///< reference optimum value, reused as the bias

    /// Looks up group, base function, minima count and f* from the reference table.
    static ProblemSpec make(int problem_id, std::size_t dim, std::size_t instance);
};

struct ReferenceRow
{
    int problem_id;
    std::string_view name;
    Group group;
    std::size_t n_minima;
    double f_star;
    BaseFunction base_fn;
};

/// The sixteen composite problems: eight base functions, each in group A (20 minima)
/// and group B (10 minima).
std::span<const ReferenceRow> reference_table();

struct GeneratorConfig
{
    double min_hardness = 1.0;
    double max_hardness = 3.0;
    double warp_exponent = 1.5;
    double min_separation = 0.5;
    std::size_t max_attempts = 10000;
    double sigma_w = 1.0;
    Bounds bounds{};
};

struct GeneratedProblem
{
    ProblemSpec spec;
    NicheSet niche;
    std::uint64_t seed = 0;
    double bias = 0.0;

    double operator()(const Vector& x) const { return composite_fitness(x, niche); }
};

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
Matrix random_rotation(std::size_t dim, Rng& rng);

/// Warped uniform placement with rejection of points closer than min_separation.
std::vector<Vector> generate_positions(std::size_t n_minima, std::size_t dim, Rng& rng,
                                       const GeneratorConfig& config = {});

/// seed = derive_seed(master_seed, {problem_id, dim, instance}).
std::uint64_t problem_seed(const ProblemSpec& spec, std::uint64_t master_seed);

/// Deterministic realization of a problem. Draw order from the seeded stream:
/// positions first, then one rotation per minimum in index order.
GeneratedProblem instantiate_problem(const ProblemSpec& spec, std::uint64_t master_seed,
                                     const GeneratorConfig& config = {});

} // namespace nichecma
