#include "nichecma/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "nichecma/error.hpp"
#include "nichecma/harness.hpp"
#include "nichecma/metrics.hpp"

namespace nichecma {

namespace {

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& s, std::size_t line)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::size_t to_count(const std::string& s, std::size_t line)
{
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end == s.c_str() || *end != '\0')
        throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": bad integer '" + s + "'");
    return static_cast<std::size_t>(v);
}

} // namespace

std::vector<CsvRecord> parse_csv(std::string_view text)
{
    std::vector<CsvRecord> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        if (line_no == 1)
        {
            if (line != kCsvHeader)
                throw Error(ErrorKind::parse, "unexpected CSV header");
            continue;
        }
        if (line.empty())
            continue;

        const auto f = split(line, ',');
        if (f.size() != 16)
            throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected 16 fields");
        if (f[1].size() != 1)
            throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": bad group");

        CsvRecord r;
        r.problem_id = static_cast<int>(to_count(f[0], line_no));
        r.group = f[1][0];
        r.dim = to_count(f[2], line_no);
        r.instance = to_count(f[3], line_no);
        r.f_star = to_double(f[4], line_no);
        r.f_best = to_double(f[5], line_no);
        r.epsilon_f = to_double(f[6], line_no);
        r.n_true = to_count(f[7], line_no);
        r.n_reported = to_count(f[8], line_no);
        r.n_matched = to_count(f[9], line_no);
        r.precision = to_double(f[10], line_no);
        r.recall = to_double(f[11], line_no);
        r.f1 = to_double(f[12], line_no);
        r.restarts = to_count(f[13], line_no);
        r.evals_used = to_count(f[14], line_no);
        r.wall_ms = to_double(f[15], line_no);
        rows.push_back(r);
    }
    if (line_no == 0)
        throw Error(ErrorKind::parse, "empty CSV");
    return rows;
}

std::vector<CsvRecord> read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

Summary summarize(std::span<const CsvRecord> rows)
{
    Summary s;
    std::set<int> problems;
    std::set<std::size_t> dims;
    std::vector<RunMetrics> metrics;
    double precision_sum = 0.0;

    for (const auto& r : rows)
    {
        ++s.runs;
        problems.insert(r.problem_id);
        dims.insert(r.dim);
        if (!std::isfinite(r.epsilon_f) || !std::isfinite(r.f1))
        {
            ++s.failed_runs;
            continue;
        }
        auto& cell = s.cells[{r.problem_id, r.dim}];
        cell.mean_epsilon_f += r.epsilon_f;
        cell.mean_f1 += r.f1;
        ++cell.runs;
        precision_sum += r.precision;
        metrics.push_back({r.epsilon_f, r.precision, r.recall, r.f1, r.evals_used});
    }
    for (auto& [key, cell] : s.cells)
    {
        cell.mean_epsilon_f /= static_cast<double>(cell.runs);
        cell.mean_f1 /= static_cast<double>(cell.runs);
    }
    s.problems.assign(problems.begin(), problems.end());
    s.dims.assign(dims.begin(), dims.end());
    if (!metrics.empty())
    {
        s.mean_precision = precision_sum / static_cast<double>(metrics.size());
        double f1_sum = 0.0;
        for (const auto& m : metrics)
            f1_sum += m.f1;
        s.mean_f1 = f1_sum / static_cast<double>(metrics.size());
        s.overall_score = overall_score(metrics);
    }
    return s;
}

std::string format_report(const Summary& summary)
{
    std::string out;
    char buf[128];

    out += "problem";
    for (auto d : summary.dims)
    {
        std::snprintf(buf, sizeof buf, "\teps_f[d=%zu]\tF1[d=%zu]", d, d);
        out += buf;
    }
    out += '\n';
    for (int pid : summary.problems)
    {
        out += std::to_string(pid);
        for (auto d : summary.dims)
        {
            const auto it = summary.cells.find({pid, d});
            if (it == summary.cells.end())
                out += "\t-\t-";
            else
            {
                std::snprintf(buf, sizeof buf, "\t%.4g\t%.4f", it->second.mean_epsilon_f, it->second.mean_f1);
                out += buf;
            }
        }
        out += '\n';
    }
    std::snprintf(buf, sizeof buf, "runs\t%zu\nfailed\t%zu\n", summary.runs, summary.failed_runs);
    out += buf;
    std::snprintf(buf, sizeof buf, "mean_precision\t%.4f\nmean_f1\t%.4f\noverall_score\t%.4f\n", summary.mean_precision,
                  summary.mean_f1, summary.overall_score);
    out += buf;
    return out;
}

} // namespace nichecma
