#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nichecma/rng.hpp"
#include "nichecma/types.hpp"

namespace nichecma {

/// Strategy constants, all derived from the dimension and population size.
struct CmaParams
{
    std::size_t n = 0;
    std::size_t lambda = 0;
    std::size_t mu = 0;
    std::vector<double> weights;
    double mu_eff = 0.0;
    double c_c = 0.0;
    double c_sigma = 0.0;
    double d_sigma = 0.0;
    double c_1 = 0.0;
    double c_mu = 0.0;
    double expected_norm = 0.0; ///< cached E||N(0, I)||
    std::size_t eigen_refresh_interval = 1;
};

/// lambda = override or 10n, mu = lambda/2, equal weights.
CmaParams derive_params(std::size_t n, std::optional<std::size_t> lambda_override = std::nullopt);

/// Variance-effective selection mass 1 / sum(w^2); equals mu exactly for equal weights.
double effective_mass(std::span<const double> weights);

/// Expected length of an n-dimensional standard normal vector,
/// sqrt(2) * Gamma((n+1)/2) / Gamma(n/2), evaluated through lgamma.
double expected_norm(std::size_t n);

struct EigenCache
{
    Matrix basis;       ///< eigenvectors, column-wise
    Vector eigenvalues; ///< ascending
    Vector scales;      ///< sqrt(eigenvalues)
    std::size_t age = 0;
    bool valid = false;
};

struct CmaState
{
    std::size_t generation = 0;
    Vector mean;
    double sigma = 1.0;
    Matrix cov;
    Vector path_c;
    Vector path_sigma;
    EigenCache eigen;
    double last_condition = 1.0; ///< condition number before the last repair
    std::size_t ill_conditioned_streak = 0;
    double last_fitness_range = std::numeric_limits<double>::infinity(); ///< worst minus best of the last generation
    bool degenerate = false; ///< set when the covariance became non-finite and was reset

    /// Fresh state: C = I, zero paths.
    static CmaState initial(Vector mean, double sigma);
};

struct Candidate
{
    Vector x;
    double fitness = std::numeric_limits<double>::quiet_NaN();
    std::size_t feasible_draws = 0;
};

using Objective = std::function<double(const Vector&)>;

/// Recomputes the eigendecomposition when the cache is older than the refresh interval.
void refresh_eigen(CmaState& state, const CmaParams& params, bool force = false);

/// Draws lambda candidates from N(mean, sigma^2 C). Out-of-box draws are
/// redrawn up to 10 times and then clamped coordinate-wise.
std::vector<Candidate> sample_population(CmaState& state, const CmaParams& params, Rng& rng,
                                         const Bounds& bounds = {});

/// Weighted recombination of the mu best. `sorted` must be ascending by fitness.
Vector update_mean(std::span<const Candidate> sorted, const CmaParams& params);

Vector update_path_sigma(const CmaState& state, const Vector& new_mean, const CmaParams& params);

/// 1 when the normalized step path is short enough to allow the rank-one update.
/// Reads `state.path_sigma` (already updated) and `state.generation` as t.
int stall_indicator(const CmaState& state, const CmaParams& params);

Vector update_path_c(const CmaState& state, const Vector& new_mean, int h, const CmaParams& params);

/// Rank-one plus rank-mu update. Reads `state.path_c` (already updated),
/// the pre-update mean and sigma.
Matrix update_covariance(const CmaState& state, std::span<const Candidate> sorted, int h,
                         const CmaParams& params);

double update_sigma(const CmaState& state, const CmaParams& params);

struct CovarianceRepair
{
    Matrix cov;
    Vector eigenvalues;
    Matrix basis;
    double condition_before = 1.0;
    bool floored = false;
};

inline constexpr double kEigenFloorRatio = 1e-14;

/// Symmetrizes and floors eigenvalues at 1e-14 * max eigenvalue.
/// Returns nullopt on non-finite input, which callers treat as a reset signal.
std::optional<CovarianceRepair> repair_covariance(const Matrix& cov);

struct StepResult
{
    std::vector<Candidate> population; ///< sorted ascending by fitness
    std::vector<std::size_t> ranking;  ///< sample index of each sorted entry
    std::size_t evals_used = 0;

    const Candidate& best() const { return population.front(); }
};

/// One full generation: sample, evaluate, rank, and adapt mean, paths, C and sigma.
StepResult step(CmaState& state, const CmaParams& params, const Objective& objective, Rng& rng,
                const Bounds& bounds = {});

enum class StopReason
{
    sigma_floor,
    stagnation,
    flat_fitness,
    ill_conditioned,
    degenerate,
};

const char* to_string(StopReason reason) noexcept;

struct TerminationLimits
{
    double sigma_floor = 1e-12;
    double min_improvement = 1e-12;
    std::size_t stagnation_generations_per_dim = 50;
    /// flat_fitness fires when the last generation's fitness range and the best-value
    /// improvement over this many generations are both below min_improvement
    std::size_t flat_generations = 20;
    /// consecutive eigen refreshes with pre-repair condition >= 1e14
    std::size_t ill_conditioned_repeats = 2;
};

/// `history` holds the best-so-far fitness of the current restart, one entry per generation.
std::optional<StopReason> check_termination(const CmaState& state, const std::deque<double>& history,
                                            const TerminationLimits& limits = {});

} // namespace nichecma
