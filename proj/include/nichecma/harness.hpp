#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nichecma/benchmark_suite.hpp"
#include "nichecma/cma_core.hpp"
#include "nichecma/metrics.hpp"

namespace nichecma {

inline constexpr std::uint64_t kDefaultMasterSeed = 2024;

struct RunConfig
{
    std::size_t budget_multiplier = 50000;
    std::vector<std::size_t> dims{2, 5, 10, 20};
    std::size_t instances = 15;
    std::vector<int> problems{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    std::uint64_t master_seed = kDefaultMasterSeed;
    double sigma0 = 2.0;
    std::optional<std::size_t> lambda_override;
    std::optional<double> archive_f_tol; ///< default 1e-3 * (1 + |bias|)
    std::optional<double> match_radius;  ///< default niche radius
    std::size_t trace_every = 1;
    std::optional<std::filesystem::path> trace_dir;
    std::size_t archive_capacity = 256;
    /// Step size of archive-seeded restarts, in units of the niche radius.
    double seeded_sigma_scale = 1.0;
    /// Population multiplier applied after a restart that ends worse than the incumbent; 1 disables.
    double population_growth = 2.0;
    GeneratorConfig generator{};
    TerminationLimits termination{};

    void validate() const;
};

struct ArchiveEntry
{
    Vector x;
    double fitness = 0.0;
    std::size_t eval_stamp = 0;
};

/// Distinct good solutions found during a run, at most one per niche-radius ball,
/// sorted ascending by fitness. When over capacity the worst entry is evicted.
class Archive
{
public:
    explicit Archive(std::size_t capacity = 256) : capacity_(capacity) {}

    /// Keeps the candidate unless an entry within `radius` is at least as good.
    /// Entries within `radius` that the candidate beats are replaced by it.
    bool insert(const Vector& x, double fitness, std::size_t eval_stamp, double radius);

    const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t capacity_;
    std::vector<ArchiveEntry> entries_;
};

bool archive_insert(Archive& archive, const Vector& x, double fitness, double sigma_nich, std::size_t eval_stamp = 0);

struct TraceRow
{
    std::size_t generation = 0;
    std::size_t evals = 0;
    double best_f = 0.0;
    double sigma = 0.0;
    std::size_t restart_index = 0;
};

struct RunRecord
{
    ProblemSpec spec;
    double f_star = 0.0;
    double f_best = 0.0;
    RunMetrics metrics;
    std::size_t n_true = 0;
    std::size_t n_reported = 0;
    std::size_t n_matched = 0;
    std::size_t restarts = 0;
    double wall_ms = 0.0;
    std::vector<TraceRow> trace;
    std::vector<ArchiveEntry> reported;
    std::string trace_path;
    std::optional<std::string> error;
};

/// Seed of one restart: derive_seed(master, {problem_id, dim, instance, restart_index}).
std::uint64_t restart_seed(const ProblemSpec& spec, std::uint64_t master_seed, std::size_t restart_index);

/// One budgeted multi-restart optimization of a generated problem.
RunRecord run_single(const ProblemSpec& spec, const RunConfig& config);

using ProgressCallback = std::function<void(const RunRecord&, std::size_t done, std::size_t total)>;

/// problems x dims x instances in that nesting order, optionally on `jobs` threads.
/// A failing run is reported in its record's `error` field.
std::vector<RunRecord> run_suite(const RunConfig& config, std::size_t jobs = 1, const ProgressCallback& progress = {});

inline constexpr std::string_view kCsvHeader =
    "problem_id,group,dim,instance,f_star,f_best,epsilon_f,n_true,n_reported,n_matched,precision,recall,f1,"
    "restarts,evals_used,wall_ms";

std::string csv_text(std::span<const RunRecord> records);
void emit_csv(std::span<const RunRecord> records, const std::filesystem::path& path);

std::string trace_text(std::span<const TraceRow> rows);
void emit_trace(std::span<const TraceRow> rows, const std::filesystem::path& path);

} // namespace nichecma
