#include "nichecma/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "nichecma/error.hpp"

namespace nichecma {

double epsilon_f(double f_best, double f_star)
{
    return f_best - f_star;
}

DetectionReport match_peaks(std::span<const ReportedSolution> reported, std::span<const Vector> true_minima,
                            double bias, double radius, double f_tol)
{
    if (!(radius > 0.0))
        throw Error(ErrorKind::invalid_argument, "match radius must be positive");

    DetectionReport out;
    out.reported.assign(reported.begin(), reported.end());
    out.n_true = true_minima.size();

    std::vector<Match> pairs;
    for (std::size_t r = 0; r < reported.size(); ++r)
    {
        if (std::abs(reported[r].fitness - bias) > f_tol)
            continue;
        for (std::size_t m = 0; m < true_minima.size(); ++m)
        {
            const double d = (reported[r].x - true_minima[m]).norm();
            if (d <= radius)
                pairs.push_back({m, r, d});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Match& a, const Match& b) {
        return std::tie(a.distance, a.minimum, a.reported) < std::tie(b.distance, b.minimum, b.reported);
    });

    std::vector<bool> minimum_taken(true_minima.size(), false);
    std::vector<bool> reported_taken(reported.size(), false);
    for (const auto& p : pairs)
    {
        if (minimum_taken[p.minimum] || reported_taken[p.reported])
            continue;
        minimum_taken[p.minimum] = true;
        reported_taken[p.reported] = true;
        out.matched.push_back(p);
    }
    return out;
}

PrecisionRecall precision_recall(const DetectionReport& report)
{
    if (report.n_true == 0)
        throw Error(ErrorKind::invalid_argument, "precision/recall needs at least one true minimum");
    const double matched = static_cast<double>(report.matched.size());
    PrecisionRecall pr;
    pr.precision = report.reported.empty() ? 1.0 : matched / static_cast<double>(report.reported.size());
    pr.recall = matched / static_cast<double>(report.n_true);
    return pr;
}

double f1_score(double precision, double recall)
{
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

double overall_score(std::span<const RunMetrics> runs)
{
    if (runs.empty())
        throw Error(ErrorKind::undefined_score, "overall score of an empty run list");
    double total = 0.0;
    for (const auto& r : runs)
        total += r.f1 / (1.0 + std::max(0.0, r.epsilon_f));
    return total / static_cast<double>(runs.size());
}

} // namespace nichecma
