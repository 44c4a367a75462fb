#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "tsconf/conformal.hpp"
#include "tsconf/scoring.hpp"

using namespace tsconf;

namespace {

std::vector<DataPoint> ys(std::initializer_list<double> values) {
    std::vector<DataPoint> out;
    for (const double y : values) out.push_back({0.0, y});
    return out;
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("pretrained threshold is an order statistic of the scores") {
    const auto s = residual_score_pretrained([](double) { return 0.0; });
    const auto series = ys({5.0, 1.0, 3.0, 2.0, 4.0});
    // Level 0.5 * (1 + 1/5) = 0.6 -> 3rd smallest of {5,1,3,2,4}.
    const auto rule = calibrate_pretrained(s, series, 0.5);
    CHECK(rule.threshold == doctest::Approx(3.0));
    CHECK(rule.m_cal == 5);
    CHECK(rule.alpha == 0.5);
    CHECK(rule.mode == PredictionRule::Mode::pretrained);
    CHECK(rule.context.empty());

    CHECK(evaluate_coverage(rule, {0.0, 2.5}).covered);
    CHECK(evaluate_coverage(rule, {0.0, -3.0}).covered);  // score exactly 3
    CHECK_FALSE(evaluate_coverage(rule, {0.0, 3.5}).covered);
}

TEST_CASE("small calibration sets give an infinite threshold") {
    const auto s = residual_score_pretrained([](double) { return 0.0; });
    const auto series = ys({5.0, 1.0, 3.0, 2.0, 4.0});
    // Level 0.9 * (1 + 1/5) = 1.08 > 1.
    const auto rule = calibrate_pretrained(s, series, 0.1);
    CHECK(rule.threshold == kInf);
    CHECK(evaluate_coverage(rule, {0.0, 1e12}).covered);
    const auto iv = interval_from_rule(rule, 0.3, {});
    CHECK(iv.unbounded());
}

TEST_CASE("memory-1 scores drop the first score and keep the last context") {
    ScoreFunction s;
    s.memory = 1;
    s.eval = [](const DataPoint& z, std::span<const DataPoint> ctx) {
        return std::abs(z.y - ctx[0].y);
    };
    const auto series = ys({0.0, 1.0, 3.0, 6.0});
    // Calibration scores: |1-0|, |3-1|, |6-3| = {1, 2, 3}; level
    // 0.5 * (1 + 1/3) = 2/3 -> 2nd smallest = 2.
    const auto rule = calibrate_pretrained(s, series, 0.5);
    CHECK(rule.m_cal == 3);
    CHECK(rule.threshold == doctest::Approx(2.0));
    REQUIRE(rule.context.size() == 1);
    CHECK(rule.context[0].y == doctest::Approx(6.0));
    // Test point scored against the stored context (last observed point).
    CHECK(evaluate_coverage(rule, {0.0, 7.5}).covered);
    CHECK_FALSE(evaluate_coverage(rule, {0.0, 8.5}).covered);
}

TEST_CASE("series too short to calibrate") {
    ScoreFunction s;
    s.memory = 1;
    s.eval = [](const DataPoint&, std::span<const DataPoint>) { return 0.0; };
    const auto series = ys({1.0});
    CHECK_THROWS_AS((void)calibrate_pretrained(s, series, 0.1), std::invalid_argument);
}

TEST_CASE("split calibration trains on the head and calibrates on the tail") {
    std::vector<DataPoint> series = {
        {0.0, 0.0}, {1.0, 2.0}, {2.0, 4.0},          // training block: y = 2x
        {0.5, 1.0 + 0.1}, {1.5, 3.0 + 0.3}, {2.5, 5.0 + 0.2},  // calibration
    };
    const auto rule = calibrate_split(ar_residual_trainer(0), series, 3, 0.5);
    CHECK(rule.mode == PredictionRule::Mode::split);
    CHECK(rule.m_cal == 3);
    // Residuals {0.1, 0.3, 0.2}; level 0.5 * (4/3) = 2/3 -> 2nd smallest.
    CHECK(rule.threshold == doctest::Approx(0.2).epsilon(1e-6));

    const auto iv = interval_from_rule(rule, 1.0, {});
    CHECK(iv.lo == doctest::Approx(2.0 - 0.2).epsilon(1e-6));
    CHECK(iv.hi == doctest::Approx(2.0 + 0.2).epsilon(1e-6));
    CHECK_FALSE(iv.empty);
    CHECK_FALSE(iv.unbounded());

    CHECK_THROWS_AS((void)calibrate_split(ar_residual_trainer(0), series, 0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)calibrate_split(ar_residual_trainer(0), series, 6, 0.5),
                    std::invalid_argument);
}

TEST_CASE("interval degenerate cases") {
    PredictionRule rule;
    rule.score_fn = residual_score_pretrained([](double x) { return x; });
    rule.threshold = -kInf;
    const auto empty = interval_from_rule(rule, 2.0, {});
    CHECK(empty.empty);

    rule.threshold = 0.0;
    const auto point = interval_from_rule(rule, 2.0, {});
    CHECK(point.lo == doctest::Approx(2.0));
    CHECK(point.hi == doctest::Approx(2.0));

    // Non-residual scores cannot produce a y-interval.
    PredictionRule opaque;
    opaque.score_fn = rank_score({{0, 0}, {1, 1}});
    opaque.threshold = 1.0;
    CHECK_THROWS_AS((void)interval_from_rule(opaque, 0.0, {}), std::invalid_argument);
}

TEST_CASE("coverage outcome reports the comparison operands") {
    const auto s = residual_score_pretrained([](double) { return 0.0; });
    const auto series = ys({1.0, 2.0, 3.0, 4.0});
    const auto rule = calibrate_pretrained(s, series, 0.5);
    const auto out = evaluate_coverage(rule, {0.0, 2.5});
    CHECK(out.test_score == doctest::Approx(2.5));
    CHECK(out.threshold == rule.threshold);
    CHECK(out.covered == (out.test_score <= out.threshold));
}
