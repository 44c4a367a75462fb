#include "tsconf/conformal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsconf/quantile.hpp"

namespace tsconf {

bool Interval::unbounded() const {
    return !empty && std::isinf(hi) && std::isinf(lo);
}

namespace {

std::vector<DataPoint> recent_context(std::span<const DataPoint> series, std::size_t L) {
    std::vector<DataPoint> context(L);
    const std::size_t n = series.size();
    for (std::size_t j = 0; j < L; ++j) {
        context[j] = series[n - 1 - j];
    }
    return context;
}

}  // namespace

PredictionRule calibrate_pretrained(const ScoreFunction& s,
                                    std::span<const DataPoint> first_n, double alpha) {
    const auto L = static_cast<std::size_t>(s.memory);
    const std::size_t n = first_n.size();
    if (n <= L) {
        throw std::invalid_argument("no calibration scores");
    }
    const std::vector<double> scores = score_series(s, first_n, L + 1);
    PredictionRule rule;
    rule.score_fn = s;
    rule.alpha = alpha;
    rule.mode = PredictionRule::Mode::pretrained;
    rule.m_cal = n - L;
    rule.threshold = quantile(scores, conformal_level(alpha, rule.m_cal));
    rule.context = recent_context(first_n, L);
    return rule;
}

PredictionRule calibrate_split(const TrainingAlgorithm& algorithm,
                               std::span<const DataPoint> first_n, std::size_t n0,
                               double alpha) {
    const std::size_t n = first_n.size();
    if (n0 < 1 || n0 >= n) {
        throw std::invalid_argument("split point must satisfy 1 <= n0 < n");
    }
    const ScoreFunction s = algorithm(first_n.subspan(0, n0));
    const auto L = static_cast<std::size_t>(s.memory);
    const std::size_t n1 = n - n0;
    if (n1 <= L) {
        throw std::invalid_argument("calibration block too short");
    }
    const std::vector<double> scores = score_series(s, first_n, n0 + L + 1);
    PredictionRule rule;
    rule.score_fn = s;
    rule.alpha = alpha;
    rule.mode = PredictionRule::Mode::split;
    rule.m_cal = n1 - L;
    rule.threshold = quantile(scores, conformal_level(alpha, rule.m_cal));
    rule.context = recent_context(first_n, L);
    return rule;
}

CoverageOutcome evaluate_coverage(const PredictionRule& rule, const DataPoint& test_point) {
    if (rule.context.size() != static_cast<std::size_t>(rule.score_fn.memory)) {
        throw std::invalid_argument("rule context does not match score memory");
    }
    CoverageOutcome outcome;
    outcome.test_score = rule.score_fn.eval(test_point, rule.context);
    outcome.threshold = rule.threshold;
    outcome.covered = outcome.test_score <= rule.threshold;
    return outcome;
}

Interval interval_from_rule(const PredictionRule& rule, double x,
                            std::span<const DataPoint> context) {
    if (!rule.score_fn.is_residual()) {
        throw std::invalid_argument("interval form unavailable");
    }
    Interval interval;
    if (rule.threshold == -std::numeric_limits<double>::infinity()) {
        interval.empty = true;
        return interval;
    }
    const double center = rule.score_fn.predict(x, context);
    interval.lo = center - rule.threshold;
    interval.hi = center + rule.threshold;
    return interval;
}

}  // namespace tsconf
