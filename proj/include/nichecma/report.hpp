#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nichecma {

/// One parsed data row of a results CSV.
struct CsvRecord
{
    int problem_id = 0;
    char group = 'A';
    std::size_t dim = 0;
    std::size_t instance = 0;
    double f_star = 0.0;
    double f_best = 0.0;
    double epsilon_f = 0.0;
    std::size_t n_true = 0;
    std::size_t n_reported = 0;
    std::size_t n_matched = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t restarts = 0;
    std::size_t evals_used = 0;
    double wall_ms = 0.0;
};

std::vector<CsvRecord> parse_csv(std::string_view text);
std::vector<CsvRecord> read_csv(const std::filesystem::path& path);

struct CellSummary
{
    double mean_epsilon_f = 0.0;
    double mean_f1 = 0.0;
    std::size_t runs = 0;
};

struct Summary
{
    std::map<std::pair<int, std::size_t>, CellSummary> cells; ///< keyed by (problem_id, dim)
    std::vector<int> problems;
    std::vector<std::size_t> dims;
    std::size_t runs = 0;
    std::size_t failed_runs = 0; ///< rows with non-finite metrics, excluded from means
    double mean_precision = 0.0;
    double mean_f1 = 0.0;
    double overall_score = 0.0;
};

Summary summarize(std::span<const CsvRecord> rows);

/// Wide table: one line per problem, mean epsilon_f and F1 per dimension,
/// followed by suite-wide precision, F1 and overall score.
std::string format_report(const Summary& summary);

} // namespace nichecma
