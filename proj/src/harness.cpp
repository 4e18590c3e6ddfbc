#include "nichecma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "nichecma/error.hpp"

namespace nichecma {

namespace {

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw Error(ErrorKind::io, "failed writing " + path.string());
}

double min_distance(const Vector& x, std::span<const Vector> points)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points)
        best = std::min(best, (x - p).norm());
    return best;
}

// Restart placement. The first restart starts from a uniform point with the
// configured sigma0. Later ones pick the archive entry farthest from everything
// explored so far (earlier restart seeds and end points), i.e. the least explored
// niche; on ties the fitter entry wins since entries are sorted. The seed is
// jittered by N(0, (r/2)^2 I) and started with sigma = scale * r.
struct RestartPlan
{
    Vector mean;
    double sigma;
};

RestartPlan plan_restart(std::size_t restart, const Archive& archive, std::span<const Vector> explored,
                         const GeneratedProblem& problem, const RunConfig& config, Rng& rng)
{
    const auto& bounds = config.generator.bounds;
    const auto n = static_cast<Eigen::Index>(problem.spec.dim);
    const double radius = problem.niche.niche_radius;

    if (restart == 0 || archive.empty())
    {
        Vector m(n);
        for (Eigen::Index i = 0; i < n; ++i)
            m[i] = rng.uniform(bounds.lower, bounds.upper);
        return RestartPlan{std::move(m), config.sigma0};
    }

    const ArchiveEntry* pick = &archive.entries().front();
    double farthest = -1.0;
    for (const auto& entry : archive.entries())
    {
        const double d = min_distance(entry.x, explored);
        if (d > farthest)
        {
            farthest = d;
            pick = &entry;
        }
    }
    Vector m = pick->x;
    for (Eigen::Index i = 0; i < n; ++i)
        m[i] += 0.5 * radius * rng.normal();
    return RestartPlan{bounds.clamp(m), config.seeded_sigma_scale * radius};
}

} // namespace

void RunConfig::validate() const
{
    if (budget_multiplier < 1)
        throw Error(ErrorKind::empty_budget, "budget multiplier must be at least 1");
    if (dims.empty() || std::find(dims.begin(), dims.end(), std::size_t{0}) != dims.end())
        throw Error(ErrorKind::invalid_dimension, "dimensions must be non-empty and positive");
    if (instances < 1)
        throw Error(ErrorKind::invalid_argument, "instances must be at least 1");
    if (problems.empty())
        throw Error(ErrorKind::invalid_argument, "problem list is empty");
    if (!(sigma0 > 0.0))
        throw Error(ErrorKind::invalid_argument, "sigma0 must be positive");
    if (trace_every < 1)
        throw Error(ErrorKind::invalid_argument, "trace_every must be at least 1");
    if (archive_capacity < 1)
        throw Error(ErrorKind::invalid_argument, "archive capacity must be at least 1");
}

bool Archive::insert(const Vector& x, double fitness, std::size_t eval_stamp, double radius)
{
    if (entries_.size() >= capacity_ && fitness >= entries_.back().fitness)
        return false;

    std::vector<std::size_t> beaten;
    for (std::size_t i = 0; i < entries_.size(); ++i)
    {
        if ((entries_[i].x - x).norm() > radius)
            continue;
        if (entries_[i].fitness <= fitness)
            return false;
        beaten.push_back(i);
    }
    for (auto it = beaten.rbegin(); it != beaten.rend(); ++it)
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(*it));

    const auto pos = std::upper_bound(entries_.begin(), entries_.end(), fitness,
                                      [](double f, const ArchiveEntry& e) { return f < e.fitness; });
    entries_.insert(pos, ArchiveEntry{x, fitness, eval_stamp});
    if (entries_.size() > capacity_)
        entries_.pop_back();
    return true;
}

bool archive_insert(Archive& archive, const Vector& x, double fitness, double sigma_nich, std::size_t eval_stamp)
{
    return archive.insert(x, fitness, eval_stamp, sigma_nich);
}

std::uint64_t restart_seed(const ProblemSpec& spec, std::uint64_t master_seed, std::size_t restart_index)
{
    return derive_seed(master_seed,
                       {static_cast<std::uint64_t>(spec.problem_id), spec.dim, spec.instance, restart_index});
}

RunRecord run_single(const ProblemSpec& spec, const RunConfig& config)
{
    const auto started = std::chrono::steady_clock::now();
    config.validate();

    const auto problem = instantiate_problem(spec, config.master_seed, config.generator);
    const std::size_t budget = spec.dim * config.budget_multiplier;
    const auto base_params = derive_params(spec.dim, config.lambda_override);
    const double radius = problem.niche.niche_radius;
    const double f_tol = config.archive_f_tol.value_or(1e-3 * (1.0 + std::abs(problem.bias)));
    const double match_radius = config.match_radius.value_or(radius);
    const std::size_t window = config.termination.stagnation_generations_per_dim * spec.dim;
    const Objective objective = [&problem](const Vector& x) { return problem(x); };

    RunRecord rec;
    rec.spec = spec;
    rec.f_star = problem.bias;
    rec.f_best = std::numeric_limits<double>::infinity();

    Archive archive(config.archive_capacity);
    std::vector<Vector> explored;
    std::size_t evals = 0;
    std::size_t generation = 0;
    double last_sigma = config.sigma0;
    auto params = base_params;

    while (budget - evals >= params.lambda)
    {
        const std::size_t restart = rec.restarts;
        Rng rng(restart_seed(spec, config.master_seed, restart));
        auto plan = plan_restart(restart, archive, explored, problem, config, rng);
        if (restart > 0)
            explored.push_back(plan.mean);
        auto state = CmaState::initial(std::move(plan.mean), plan.sigma);

        const double prior_best = rec.f_best;
        std::deque<double> history;
        double restart_best = std::numeric_limits<double>::infinity();
        Vector restart_best_x = state.mean;

        while (budget - evals >= params.lambda)
        {
            const auto result = step(state, params, objective, rng, config.generator.bounds);
            evals += result.evals_used;
            if (evals > budget)
                throw Error(ErrorKind::numeric, "evaluation budget exceeded");

            for (const auto& cand : result.population)
                archive.insert(cand.x, cand.fitness, evals, radius);

            if (result.best().fitness < restart_best)
            {
                restart_best = result.best().fitness;
                restart_best_x = result.best().x;
            }
            rec.f_best = std::min(rec.f_best, restart_best);

            history.push_back(restart_best);
            if (history.size() > window + 1)
                history.pop_front();

            last_sigma = state.sigma;
            if (generation % config.trace_every == 0)
                rec.trace.push_back({generation, evals, rec.f_best, state.sigma, restart});
            ++generation;

            if (check_termination(state, history, config.termination))
                break;
        }
        explored.push_back(std::move(restart_best_x));
        ++rec.restarts;

        // A restart that lands on the incumbent's value shows the base population is
        // enough here. Any other outcome (worse, or better so the earlier restarts were
        // not optimal either) means the landscape is too rugged for it: grow.
        if (restart > 0 && config.population_growth > 1.0)
        {
            if (std::abs(restart_best - prior_best) <= 1e-8 * (1.0 + std::abs(prior_best)))
                params = base_params;
            else
                params = derive_params(spec.dim, static_cast<std::size_t>(std::ceil(
                                                     static_cast<double>(params.lambda) * config.population_growth)));
        }
    }

    if (evals == 0)
        throw Error(ErrorKind::empty_budget, "budget smaller than one generation");
    if (rec.trace.empty() || rec.trace.back().generation != generation - 1)
        rec.trace.push_back({generation - 1, evals, rec.f_best, last_sigma, rec.restarts - 1});

    std::vector<ReportedSolution> reported;
    for (const auto& e : archive.entries())
    {
        if (e.fitness > rec.f_best + f_tol)
            break;
        reported.push_back({e.x, e.fitness});
        rec.reported.push_back(e);
    }
    const auto detection = match_peaks(reported, problem.niche.positions, problem.bias, match_radius, f_tol);
    const auto pr = precision_recall(detection);

    rec.n_true = detection.n_true;
    rec.n_reported = detection.reported.size();
    rec.n_matched = detection.matched.size();
    rec.metrics.epsilon_f = epsilon_f(rec.f_best, problem.bias);
    rec.metrics.precision = pr.precision;
    rec.metrics.recall = pr.recall;
    rec.metrics.f1 = f1_score(pr.precision, pr.recall);
    rec.metrics.evals_used = evals;

    if (config.trace_dir)
    {
        char name[96];
        std::snprintf(name, sizeof name, "trace_p%02d_d%zu_i%02zu.tsv", spec.problem_id, spec.dim, spec.instance);
        const auto path = *config.trace_dir / name;
        emit_trace(rec.trace, path);
        rec.trace_path = path.string();
    }

    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

std::vector<RunRecord> run_suite(const RunConfig& config, std::size_t jobs, const ProgressCallback& progress)
{
    config.validate();

    std::vector<ProblemSpec> specs;
    for (int pid : config.problems)
        for (auto dim : config.dims)
            for (std::size_t inst = 1; inst <= config.instances; ++inst)
                specs.push_back(ProblemSpec::make(pid, dim, inst));

    std::vector<RunRecord> records(specs.size());
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++)
        {
            try
            {
                records[i] = run_single(specs[i], config);
            }
            catch (const std::exception& e)
            {
                auto& rec = records[i];
                rec = RunRecord{};
                rec.spec = specs[i];
                rec.f_star = specs[i].table_f_star;
                const double nan = std::numeric_limits<double>::quiet_NaN();
                rec.f_best = nan;
                rec.metrics = {nan, nan, nan, nan, 0};
                rec.n_true = specs[i].n_minima;
                rec.error = e.what();
            }
            if (progress)
            {
                std::lock_guard lock(progress_mutex);
                progress(records[i], ++done, specs.size());
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, specs.size()));
    if (jobs == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
    }
    return records;
}

std::string csv_text(std::span<const RunRecord> records)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : records)
    {
        out += std::to_string(r.spec.problem_id) + ',' + to_char(r.spec.group) + ',' + std::to_string(r.spec.dim) +
               ',' + std::to_string(r.spec.instance) + ',' + fmt_double(r.f_star) + ',' + fmt_double(r.f_best) + ',' +
               fmt_double(r.metrics.epsilon_f) + ',' + std::to_string(r.n_true) + ',' + std::to_string(r.n_reported) +
               ',' + std::to_string(r.n_matched) + ',' + fmt_double(r.metrics.precision) + ',' +
               fmt_double(r.metrics.recall) + ',' + fmt_double(r.metrics.f1) + ',' + std::to_string(r.restarts) + ',' +
               std::to_string(r.metrics.evals_used) + ',' + fmt_double(r.wall_ms) + '\n';
    }
    return out;
}

void emit_csv(std::span<const RunRecord> records, const std::filesystem::path& path)
{
    write_text(path, csv_text(records));
}

std::string trace_text(std::span<const TraceRow> rows)
{
    std::string out = "generation\tevals\tbest_f\tsigma\trestart_index\n";
    for (const auto& r : rows)
        out += std::to_string(r.generation) + '\t' + std::to_string(r.evals) + '\t' + fmt_double(r.best_f) + '\t' +
               fmt_double(r.sigma) + '\t' + std::to_string(r.restart_index) + '\n';
    return out;
}

void emit_trace(std::span<const TraceRow> rows, const std::filesystem::path& path)
{
    write_text(path, trace_text(rows));
}

} // namespace nichecma
