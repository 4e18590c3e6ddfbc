#include "nichecma/cma_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nichecma/error.hpp"

namespace nichecma {

namespace {

constexpr double kConditionLimit = 1e14;
constexpr std::size_t kMaxResamples = 10;

bool all_equal(std::span<const double> w)
{
    return std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
}

Vector mean_step(const CmaState& state, const Vector& new_mean)
{
    Vector step = (new_mean - state.mean) / state.sigma;
    if (!step.allFinite())
        throw Error(ErrorKind::numeric, "non-finite mean step");
    return step;
}

// C^{-1/2} from the cache when present, otherwise from a fresh decomposition.
Matrix inverse_sqrt(const CmaState& state)
{
    if (state.eigen.valid)
        return state.eigen.basis * state.eigen.scales.cwiseInverse().asDiagonal() * state.eigen.basis.transpose();
    const auto repaired = repair_covariance(state.cov);
    if (!repaired)
        throw Error(ErrorKind::covariance_degenerate, "covariance has non-finite entries");
    return repaired->basis * repaired->eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
           repaired->basis.transpose();
}

} // namespace

double effective_mass(std::span<const double> weights)
{
    if (weights.empty())
        throw Error(ErrorKind::invalid_argument, "empty weight vector");
    if (all_equal(weights))
        return static_cast<double>(weights.size());
    double sq = 0.0;
    for (double w : weights)
        sq += w * w;
    return 1.0 / sq;
}

double expected_norm(std::size_t n)
{
    if (n == 0)
        throw Error(ErrorKind::invalid_dimension, "dimension must be at least 1");
    const double dn = static_cast<double>(n);
    return std::sqrt(2.0) * std::exp(std::lgamma((dn + 1.0) / 2.0) - std::lgamma(dn / 2.0));
}

CmaParams derive_params(std::size_t n, std::optional<std::size_t> lambda_override)
{
    if (n == 0)
        throw Error(ErrorKind::invalid_dimension, "dimension must be at least 1");

    CmaParams p;
    p.n = n;
    p.lambda = lambda_override.value_or(10 * n);
    if (p.lambda < 2)
        throw Error(ErrorKind::invalid_argument, "population size must be at least 2");
    p.mu = p.lambda / 2;
    p.weights.assign(p.mu, 1.0 / static_cast<double>(p.mu));
    p.mu_eff = effective_mass(p.weights);

    const double dn = static_cast<double>(n);
    p.c_c = 4.0 / (dn + 4.0);
    p.c_sigma = (2.0 + p.mu_eff) / (3.0 + dn + p.mu_eff);
    p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (dn + 1.0)) - 1.0) + p.c_sigma;
    p.c_1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + p.mu_eff);
    p.c_mu = std::min(1.0 - p.c_1, 2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) / ((dn + 2.0) * (dn + 2.0) + p.mu_eff));
    p.expected_norm = expected_norm(n);

    const double lag = 1.0 / (10.0 * dn * (p.c_1 + p.c_mu));
    p.eigen_refresh_interval = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(lag)));
    return p;
}

CmaState CmaState::initial(Vector mean, double sigma)
{
    const auto n = mean.size();
    CmaState s;
    s.mean = std::move(mean);
    s.sigma = sigma;
    s.cov = Matrix::Identity(n, n);
    s.path_c = Vector::Zero(n);
    s.path_sigma = Vector::Zero(n);
    s.eigen.basis = Matrix::Identity(n, n);
    s.eigen.eigenvalues = Vector::Ones(n);
    s.eigen.scales = Vector::Ones(n);
    s.eigen.valid = true;
    return s;
}

std::optional<CovarianceRepair> repair_covariance(const Matrix& cov)
{
    if (cov.rows() != cov.cols())
        throw Error(ErrorKind::invalid_argument, "covariance must be square");
    if (!cov.allFinite())
        return std::nullopt;

    CovarianceRepair out;
    out.cov = (cov + cov.transpose()) / 2.0;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(out.cov);
    if (solver.info() != Eigen::Success)
        return std::nullopt;

    out.eigenvalues = solver.eigenvalues();
    out.basis = solver.eigenvectors();
    const double max_ev = out.eigenvalues.maxCoeff();
    const double min_ev = out.eigenvalues.minCoeff();
    if (!(max_ev > 0.0) || !std::isfinite(max_ev))
        return std::nullopt;
    out.condition_before = min_ev > 0.0 ? max_ev / min_ev : std::numeric_limits<double>::infinity();

    const double floor = kEigenFloorRatio * max_ev;
    for (auto& ev : out.eigenvalues)
    {
        if (ev < floor)
        {
            ev = floor;
            out.floored = true;
        }
    }
    if (out.floored)
    {
        const Matrix rebuilt = out.basis * out.eigenvalues.asDiagonal() * out.basis.transpose();
        out.cov = (rebuilt + rebuilt.transpose()) / 2.0;
    }
    return out;
}

void refresh_eigen(CmaState& state, const CmaParams& params, bool force)
{
    if (!force && state.eigen.valid && state.eigen.age < params.eigen_refresh_interval)
        return;

    auto repaired = repair_covariance(state.cov);
    if (!repaired)
    {
        state.degenerate = true;
        state.cov = Matrix::Identity(state.cov.rows(), state.cov.cols());
        repaired = repair_covariance(state.cov);
    }
    state.cov = std::move(repaired->cov);
    state.eigen.basis = std::move(repaired->basis);
    state.eigen.eigenvalues = std::move(repaired->eigenvalues);
    state.eigen.scales = state.eigen.eigenvalues.cwiseSqrt();
    state.eigen.age = 0;
    state.eigen.valid = true;

    state.last_condition = repaired->condition_before;
    state.ill_conditioned_streak = state.last_condition >= kConditionLimit ? state.ill_conditioned_streak + 1 : 0;
}

std::vector<Candidate> sample_population(CmaState& state, const CmaParams& params, Rng& rng, const Bounds& bounds)
{
    refresh_eigen(state, params);

    const auto n = static_cast<Eigen::Index>(params.n);
    // Symmetric root B D B^T rather than B D: same distribution, but it does not depend
    // on the eigensolver's sign and ordering choices, so nearby covariances give nearby samples.
    const Matrix transform = state.eigen.basis * state.eigen.scales.asDiagonal() * state.eigen.basis.transpose();

    std::vector<Candidate> population(params.lambda);
    Vector z(n);
    for (auto& cand : population)
    {
        for (std::size_t draw = 0; draw <= kMaxResamples; ++draw)
        {
            for (Eigen::Index i = 0; i < n; ++i)
                z[i] = rng.normal();
            cand.x = state.mean + state.sigma * (transform * z);
            cand.feasible_draws = draw + 1;
            if (bounds.contains(cand.x))
                break;
        }
        if (!bounds.contains(cand.x))
            cand.x = bounds.clamp(cand.x);
    }
    return population;
}

Vector update_mean(std::span<const Candidate> sorted, const CmaParams& params)
{
    if (sorted.size() < params.mu)
        throw Error(ErrorKind::insufficient_population,
                    "need " + std::to_string(params.mu) + " candidates, got " + std::to_string(sorted.size()));
    Vector mean = Vector::Zero(sorted.front().x.size());
    for (std::size_t j = 0; j < params.mu; ++j)
        mean += params.weights[j] * sorted[j].x;
    return mean;
}

Vector update_path_sigma(const CmaState& state, const Vector& new_mean, const CmaParams& params)
{
    const Vector step = mean_step(state, new_mean);
    const double coeff = std::sqrt(params.c_sigma * (2.0 - params.c_sigma) * params.mu_eff);
    return (1.0 - params.c_sigma) * state.path_sigma + coeff * (inverse_sqrt(state) * step);
}

int stall_indicator(const CmaState& state, const CmaParams& params)
{
    const double t1 = static_cast<double>(state.generation + 1);
    const double correction = std::sqrt(1.0 - std::pow(1.0 - params.c_sigma, 2.0 * t1));
    const double dn = static_cast<double>(params.n);
    const double threshold = (1.5 + 1.0 / (dn - 0.5)) * params.expected_norm;
    return state.path_sigma.norm() / correction < threshold ? 1 : 0;
}

Vector update_path_c(const CmaState& state, const Vector& new_mean, int h, const CmaParams& params)
{
    const Vector step = mean_step(state, new_mean);
    const double coeff = std::sqrt(params.c_c * (2.0 - params.c_c) * params.mu_eff);
    return (1.0 - params.c_c) * state.path_c + static_cast<double>(h) * coeff * step;
}

Matrix update_covariance(const CmaState& state, std::span<const Candidate> sorted, int h, const CmaParams& params)
{
    const auto n = state.cov.rows();
    Matrix rank_mu = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < params.mu; ++i)
    {
        const Vector y = (sorted[i].x - state.mean) / state.sigma;
        rank_mu.selfadjointView<Eigen::Lower>().rankUpdate(y, params.weights[i]);
    }
    rank_mu = rank_mu.selfadjointView<Eigen::Lower>();

    const double stall = static_cast<double>(1 - h) * params.c_c * (2.0 - params.c_c);
    Matrix next = (1.0 - params.c_1 - params.c_mu) * state.cov +
                  params.c_1 * (state.path_c * state.path_c.transpose() + stall * state.cov) + params.c_mu * rank_mu;
    return (next + next.transpose()) / 2.0;
}

double update_sigma(const CmaState& state, const CmaParams& params)
{
    const double ratio = state.path_sigma.norm() / params.expected_norm;
    const double next = state.sigma * std::exp((params.c_sigma / params.d_sigma) * (ratio - 1.0));
    return std::clamp(next, 1e-300, 1e300);
}

StepResult step(CmaState& state, const CmaParams& params, const Objective& objective, Rng& rng, const Bounds& bounds)
{
    auto population = sample_population(state, params, rng, bounds);
    for (auto& cand : population)
    {
        cand.fitness = objective(cand.x);
        if (std::isnan(cand.fitness))
            throw Error(ErrorKind::numeric, "objective returned NaN");
    }

    StepResult result;
    result.evals_used = population.size();
    result.ranking.resize(population.size());
    std::iota(result.ranking.begin(), result.ranking.end(), std::size_t{0});
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [&](std::size_t a, std::size_t b) { return population[a].fitness < population[b].fitness; });
    result.population.reserve(population.size());
    for (auto idx : result.ranking)
        result.population.push_back(std::move(population[idx]));

    state.last_fitness_range = result.population.back().fitness - result.population.front().fitness;

    const Vector new_mean = update_mean(result.population, params);
    state.path_sigma = update_path_sigma(state, new_mean, params);
    const int h = stall_indicator(state, params);
    state.path_c = update_path_c(state, new_mean, h, params);
    state.cov = update_covariance(state, result.population, h, params);
    state.sigma = update_sigma(state, params);
    state.mean = new_mean;
    ++state.generation;
    ++state.eigen.age;
    refresh_eigen(state, params);
    return result;
}

const char* to_string(StopReason reason) noexcept
{
    switch (reason)
    {
    case StopReason::sigma_floor: return "sigma-floor";
    case StopReason::stagnation: return "stagnation";
    case StopReason::flat_fitness: return "flat-fitness";
    case StopReason::ill_conditioned: return "ill-conditioned";
    case StopReason::degenerate: return "degenerate";
    }
    return "unknown";
}

std::optional<StopReason> check_termination(const CmaState& state, const std::deque<double>& history,
                                            const TerminationLimits& limits)
{
    if (state.degenerate)
        return StopReason::degenerate;
    // The floor applies to the largest coordinate spread sigma*sqrt(C_ii), not to
    // sigma alone: with a large c_mu the covariance absorbs most of the shrinkage
    // and sigma can stay O(1) long after the population has collapsed.
    if (state.sigma * std::sqrt(state.cov.diagonal().maxCoeff()) < limits.sigma_floor)
        return StopReason::sigma_floor;
    if (state.ill_conditioned_streak >= limits.ill_conditioned_repeats)
        return StopReason::ill_conditioned;

    // whole population and recent best values agree: nothing left to rank
    if (state.last_fitness_range < limits.min_improvement && history.size() > limits.flat_generations &&
        history[history.size() - 1 - limits.flat_generations] - history.back() < limits.min_improvement)
        return StopReason::flat_fitness;

    const std::size_t window = limits.stagnation_generations_per_dim * static_cast<std::size_t>(state.mean.size());
    if (history.size() > window)
    {
        const double improvement = history[history.size() - 1 - window] - history.back();
        if (improvement < limits.min_improvement)
            return StopReason::stagnation;
    }
    return std::nullopt;
}

} // namespace nichecma
