#include "nichecma/benchmark_suite.hpp"

#include <array>
#include <cmath>
#include <string>

#include "nichecma/error.hpp"

namespace nichecma {

namespace {

using BF = BaseFunction;

constexpr std::array<ReferenceRow, 16> kTable = {{
    {1, "High-Conditioned Elliptic", Group::A, 20, -97.8, BF::elliptic},
    {2, "Different Powers", Group::A, 20, 64.1, BF::diff_powers},
    {3, "Skewed Schwefel No2", Group::A, 20, 483.1, BF::schwefel12_skewed},
    {4, "Rosenbrock", Group::A, 20, -96.7, BF::rosenbrock},
    {5, "Skewed Ackley", Group::A, 20, -395.0, BF::ackley_skewed},
    {6, "Rastrigin", Group::A, 20, -34.6, BF::rastrigin},
    {7, "Penalized Weierstrass", Group::A, 20, 494.0, BF::weierstrass_pen},
    {8, "Penalized Schwefel N26", Group::A, 20, -402.2, BF::schwefel226_pen},
    {9, "High-Conditioned Elliptic", Group::B, 10, -97.8, BF::elliptic},
    {10, "Different Powers", Group::B, 10, 64.1, BF::diff_powers},
    {11, "Skewed Schwefel No2", Group::B, 10, 483.1, BF::schwefel12_skewed},
    {12, "Rosenbrock", Group::B, 10, -96.7, BF::rosenbrock},
    {13, "Skewed Ackley", Group::B, 10, -395.0, BF::ackley_skewed},
    {14, "Rastrigin", Group::B, 10, -34.6, BF::rastrigin},
    {15, "Penalized Weierstrass", Group::B, 10, 494.0, BF::weierstrass_pen},
    {16, "Penalized Schwefel N26", Group::B, 10, -402.2, BF::schwefel226_pen},
}};

} // namespace

char to_char(Group g) noexcept
{
    return g == Group::A ? 'A' : 'B';
}

std::span<const ReferenceRow> reference_table()
{
    return kTable;
}

ProblemSpec ProblemSpec::make(int problem_id, std::size_t dim, std::size_t instance)
{
    if (problem_id < 1 || problem_id > static_cast<int>(kTable.size()))
        throw Error(ErrorKind::invalid_argument, "problem id must be in 1..16, got " + std::to_string(problem_id));
    if (dim == 0)
        throw Error(ErrorKind::invalid_dimension, "dimension must be at least 1");
    if (instance == 0)
        throw Error(ErrorKind::invalid_argument, "instance must be at least 1");

    const auto& row = kTable[static_cast<std::size_t>(problem_id - 1)];
    ProblemSpec spec;
    spec.problem_id = problem_id;
    spec.group = row.group;
    spec.base_fn = row.base_fn;
    spec.n_minima = row.n_minima;
    spec.dim = dim;
    spec.instance = instance;
    spec.table_f_star = row.f_star;
    return spec;
}

Matrix random_rotation(std::size_t dim, Rng& rng)
{
    if (dim == 0)
        throw Error(ErrorKind::invalid_dimension, "rotation dimension must be at least 1");
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix gauss(n, n);
    // row-major fill keeps the draw order independent of Eigen's storage order
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            gauss(r, c) = rng.normal();

    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ();
    const Matrix& packed = qr.matrixQR();
    for (Eigen::Index c = 0; c < n; ++c)
        if (packed(c, c) < 0.0)
            q.col(c) = -q.col(c);
    return q;
}

std::vector<Vector> generate_positions(std::size_t n_minima, std::size_t dim, Rng& rng, const GeneratorConfig& config)
{
    if (n_minima < 2)
        throw Error(ErrorKind::invalid_argument, "need at least two minima");
    if (dim == 0)
        throw Error(ErrorKind::invalid_dimension, "dimension must be at least 1");

    const auto n = static_cast<Eigen::Index>(dim);
    const double width = config.bounds.upper - config.bounds.lower;
    std::vector<Vector> accepted;
    accepted.reserve(n_minima);
    Vector p(n);

    while (accepted.size() < n_minima)
    {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < config.max_attempts && !placed; ++attempt)
        {
            for (Eigen::Index i = 0; i < n; ++i)
                p[i] = config.bounds.lower + width * std::pow(rng.uniform(), config.warp_exponent);
            placed = true;
            for (const auto& q : accepted)
            {
                if ((p - q).norm() < config.min_separation)
                {
                    placed = false;
                    break;
                }
            }
        }
        if (!placed)
            throw Error(ErrorKind::generation_failure,
                        "could not place minimum " + std::to_string(accepted.size() + 1) + " of " +
                            std::to_string(n_minima) + " in dimension " + std::to_string(dim));
        accepted.push_back(p);
    }
    return accepted;
}

std::uint64_t problem_seed(const ProblemSpec& spec, std::uint64_t master_seed)
{
    return derive_seed(master_seed, {static_cast<std::uint64_t>(spec.problem_id), spec.dim, spec.instance});
}

GeneratedProblem instantiate_problem(const ProblemSpec& spec, std::uint64_t master_seed, const GeneratorConfig& config)
{
    GeneratedProblem out;
    out.spec = spec;
    out.seed = problem_seed(spec, master_seed);
    out.bias = spec.table_f_star;

    Rng rng(out.seed);
    auto& niche = out.niche;
    niche.positions = generate_positions(spec.n_minima, spec.dim, rng, config);
    niche.rotations.reserve(spec.n_minima);
    for (std::size_t i = 0; i < spec.n_minima; ++i)
        niche.rotations.push_back(random_rotation(spec.dim, rng));
    for (std::size_t i = 1; i <= spec.n_minima; ++i)
        niche.hardness.push_back(hardness(i, spec.n_minima, config.min_hardness, config.max_hardness));
    niche.base_fns.assign(spec.n_minima, spec.base_fn);
    niche.niche_radius = niching_radius(niche.positions);
    niche.bias = out.bias;
    niche.sigma_w = config.sigma_w;
    return out;
}

} // namespace nichecma
