#include "doctest.h"

#include <cmath>
#include <set>

#include "nichecma/error.hpp"
#include "nichecma/metrics.hpp"
#include "nichecma/niche_fitness.hpp"
#include "nichecma/rng.hpp"
#include "oracles.hpp"

using namespace nichecma;

namespace {

DetectionReport counts(std::size_t n_true, std::size_t n_rep, std::size_t n_match)
{
    DetectionReport r;
    r.n_true = n_true;
    r.reported.resize(n_rep);
    r.matched.resize(n_match);
    return r;
}

} // namespace

TEST_CASE("epsilon_f")
{
    CHECK(epsilon_f(497.5441, 483.1) == doctest::Approx(14.4441).epsilon(1e-12));
    CHECK(epsilon_f(3.0, 3.0) == 0.0);
    CHECK(epsilon_f(-402.07716, -402.2) == doctest::Approx(0.12284).epsilon(1e-10));
}

TEST_CASE("precision_recall and f1")
{
    auto pr = precision_recall(counts(10, 10, 10));
    CHECK(pr.precision == 1.0);
    CHECK(pr.recall == 1.0);
    pr = precision_recall(counts(10, 20, 10));
    CHECK(pr.precision == 0.5);
    CHECK(pr.recall == 1.0);
    pr = precision_recall(counts(20, 10, 8));
    CHECK(pr.precision == doctest::Approx(0.8));
    CHECK(pr.recall == doctest::Approx(0.4));
    pr = precision_recall(counts(5, 0, 0));
    CHECK(pr.precision == 1.0);
    CHECK(pr.recall == 0.0);

    CHECK(f1_score(1.0, 1.0) == 1.0);
    CHECK(f1_score(0.0, 0.7) == 0.0);
    CHECK(f1_score(0.0, 0.0) == 0.0);
    CHECK(f1_score(0.75, 0.6) == doctest::Approx(2.0 * 0.45 / 1.35));
}

TEST_CASE("overall_score")
{
    std::vector<RunMetrics> perfect(4, RunMetrics{0.0, 1.0, 1.0, 1.0, 0});
    CHECK(overall_score(perfect) == 1.0);

    std::vector<RunMetrics> one{RunMetrics{1.0, 0.5, 0.5, 0.5, 0}};
    CHECK(overall_score(one) == doctest::Approx(0.25));

    std::vector<RunMetrics> runs{RunMetrics{0.1, 1, 1, 0.8, 0}, RunMetrics{2.0, 1, 1, 0.6, 0}};
    double prev = overall_score(runs);
    for (double eps : {2.5, 3.0, 10.0, 1e6})
    {
        runs[1].epsilon_f = eps;
        const double now = overall_score(runs);
        CHECK(now <= prev);
        prev = now;
    }
    CHECK_THROWS_AS(overall_score(std::vector<RunMetrics>{}), Error);
}

TEST_CASE("match_peaks basics")
{
    const std::vector<Vector> minima{Vector{{0.0, 0.0}}, Vector{{3.0, 0.0}}, Vector{{0.0, 3.0}}};

    std::vector<ReportedSolution> exact;
    for (const auto& m : minima)
        exact.push_back({m, 1.0});
    auto rep = match_peaks(exact, minima, 1.0, 1.5, 1e-3);
    auto pr = precision_recall(rep);
    CHECK(rep.matched.size() == 3);
    CHECK(pr.precision == 1.0);
    CHECK(pr.recall == 1.0);

    rep = match_peaks({}, minima, 1.0, 1.5, 1e-3);
    CHECK(rep.matched.empty());
    CHECK(rep.n_true == 3);

    const std::vector<ReportedSolution> crowd{
        {Vector{{0.1, 0.0}}, 1.0}, {Vector{{0.0, 0.1}}, 1.0}, {Vector{{-0.1, 0.0}}, 1.0}};
    rep = match_peaks(crowd, minima, 1.0, 1.5, 1e-3);
    CHECK(rep.matched.size() == 1);

    // fitness outside tolerance never matches
    const std::vector<ReportedSolution> poor{{Vector{{0.0, 0.0}}, 1.1}};
    CHECK(match_peaks(poor, minima, 1.0, 1.5, 1e-3).matched.empty());
}

TEST_CASE("match_peaks agrees with the optimal-assignment oracle")
{
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial)
    {
        const int n_true = 2 + static_cast<int>(rng() % 7);
        const int n_rep = static_cast<int>(rng() % 9);
        std::vector<Vector> minima(n_true, Vector(2));
        for (auto& m : minima)
            m = Vector{{rng.uniform(-5, 5), rng.uniform(-5, 5)}};
        const double radius = niching_radius(minima);
        const double tol = 0.01;
        std::vector<ReportedSolution> reported(n_rep);
        for (auto& r : reported)
        {
            const auto& near = minima[rng() % n_true];
            r.x = near + Vector{{rng.normal(), rng.normal()}} * radius;
            r.fitness = rng.uniform() < 0.8 ? rng.uniform(0, tol) : 1.0;
        }

        const auto rep = match_peaks(reported, minima, 0.0, radius, tol);

        std::vector<std::vector<bool>> ok(n_rep, std::vector<bool>(n_true));
        for (int r = 0; r < n_rep; ++r)
            for (int t = 0; t < n_true; ++t)
                ok[r][t] = (reported[r].x - minima[t]).norm() <= radius && std::abs(reported[r].fitness) <= tol;
        CHECK(static_cast<int>(rep.matched.size()) == oracle::max_assignment(ok, n_true));

        std::set<std::size_t> used_t, used_r;
        for (const auto& m : rep.matched)
        {
            CHECK(used_t.insert(m.minimum).second);
            CHECK(used_r.insert(m.reported).second);
            CHECK(m.distance <= radius);
        }
    }
}
