#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nichecma/types.hpp"

namespace nichecma {

struct ReportedSolution
{
    Vector x;
    double fitness = 0.0;
};

struct Match
{
    std::size_t minimum = 0;
    std::size_t reported = 0;
    double distance = 0.0;
};

struct DetectionReport
{
    std::vector<ReportedSolution> reported;
    std::vector<Match> matched;
    std::size_t n_true = 0;
};

struct RunMetrics
{
    double epsilon_f = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t evals_used = 0;
};

struct PrecisionRecall
{
    double precision = 0.0;
    double recall = 0.0;
};

/// f_best - f_star.
double epsilon_f(double f_best, double f_star);

/// Greedy one-to-one matching of reported solutions to true minima.
/// Pairs are visited by ascending distance (ties by minimum index, then
/// reported index); a pair is accepted when the distance is within `radius`,
/// the reported fitness is within `f_tol` of `bias`, and neither side is taken.
DetectionReport match_peaks(std::span<const ReportedSolution> reported, std::span<const Vector> true_minima,
                            double bias, double radius, double f_tol);

/// precision = matched / reported (1 for an empty report), recall = matched / n_true.
PrecisionRecall precision_recall(const DetectionReport& report);

/// Harmonic mean, 0 when both inputs are 0.
double f1_score(double precision, double recall);

/// Mean over runs of f1 / (1 + max(0, epsilon_f)).
///
/// This is a stand-in aggregate: it rewards detection and penalizes
/// inaccuracy, but it is not the official competition score.
double overall_score(std::span<const RunMetrics> runs);

} // namespace nichecma
