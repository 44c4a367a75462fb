#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsconf/processes.hpp"
#include "tsconf/scoring.hpp"

namespace tsconf {

/**
 * A calibrated prediction rule: the set {y : s((x, y); context) <= threshold}.
 * The rule stores the threshold rather than an explicit set; y-intervals are
 * available only for residual scores via interval_from_rule.
 */
struct PredictionRule {
    enum class Mode { pretrained, split };

    ScoreFunction score_fn;
    double threshold = 0.0;               // may be +-infinity
    std::vector<DataPoint> context;       // (Z_n, ..., Z_{n-L+1}), most recent first
    double alpha = 0.0;
    Mode mode = Mode::pretrained;
    std::size_t m_cal = 0;                // calibration score count (n-L or n1-L)
};

struct CoverageOutcome {
    bool covered = false;
    double test_score = 0.0;
    double threshold = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = false;

    [[nodiscard]] bool unbounded() const;
};

/**
 * Pretrained calibration on Z_1..Z_n: threshold is the quantile of the n-L
 * scores (S_{L+1}, ..., S_n) at level (1-alpha)(1 + 1/(n-L)).
 */
PredictionRule calibrate_pretrained(const ScoreFunction& s,
                                    std::span<const DataPoint> first_n, double alpha);

/**
 * Split calibration: trains s = A(Z_1..Z_{n0}), then calibrates on the
 * n1-L scores (S_{n0+L+1}, ..., S_n) at level (1-alpha)(1 + 1/(n1-L)).
 */
PredictionRule calibrate_split(const TrainingAlgorithm& algorithm,
                               std::span<const DataPoint> first_n, std::size_t n0,
                               double alpha);

/// Evaluates S_{n+1} = s(Z_{n+1}; context) and compares with the threshold.
CoverageOutcome evaluate_coverage(const PredictionRule& rule, const DataPoint& test_point);

/// [f_hat - q, f_hat + q] for residual scores; empty when q = -infinity.
Interval interval_from_rule(const PredictionRule& rule, double x,
                            std::span<const DataPoint> context);

}  // namespace tsconf
