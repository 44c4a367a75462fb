#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>

#include "tsconf/harness.hpp"
#include "tsconf/oracle.hpp"

using namespace tsconf;

namespace {

FiniteMarkovSpec stay_chain(double stay, std::size_t n) {
    FiniteMarkovSpec spec;
    spec.alphabet = 2;
    spec.n = n;
    spec.transition = {stay, 1.0 - stay, 1.0 - stay, stay};
    spec.initial = {0.5, 0.5};
    return spec;
}

nlohmann::json markov_json(std::size_t n) {
    return {
        {"process",
         {{"type", "markov"},
          {"alphabet", 2},
          {"transition", {0.9, 0.1, 0.1, 0.9}},
          {"n", n}}},
        {"score", {{"kind", "rank"}}},
        {"n", n},
        {"alpha", 0.25},
        {"trials", 4000},
        {"seed", 7},
        {"jitter", true},
    };
}

}  // namespace

TEST_CASE("config json round trip") {
    const auto cfg = ExperimentConfig::from_json(markov_json(6));
    cfg.validate();
    CHECK(cfg.n == 6);
    CHECK(cfg.alpha == doctest::Approx(0.25));
    CHECK(cfg.trials == 4000);
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.jitter);
    CHECK(cfg.score.kind == ScoreSpec::Kind::rank);
    const auto* markov = std::get_if<FiniteMarkovSpec>(&cfg.process);
    REQUIRE(markov != nullptr);
    // Initial law omitted in the config: defaults to the stationary law.
    CHECK(markov->initial[0] == doctest::Approx(0.5).epsilon(1e-9));

    const auto echo = cfg.echo();
    CHECK(echo["process"]["type"] == "markov");
    CHECK(echo["alpha"].get<double>() == doctest::Approx(0.25));
    CHECK(echo["mode"] == "pretrained");
}

TEST_CASE("config validation rejects inconsistent setups") {
    auto j = markov_json(6);
    j["trials"] = 0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), std::invalid_argument);

    j = markov_json(6);
    j["mode"] = "split";  // split requires a trained score
    CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), std::invalid_argument);

    j = markov_json(6);
    j["score"] = {{"kind", "trained_ar"}};  // and vice versa
    CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), std::invalid_argument);

    j = markov_json(6);
    j["alpha"] = 1.5;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), std::invalid_argument);

    j = markov_json(6);
    j["process"]["type"] = "unknown";
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(j), std::invalid_argument);
}

TEST_CASE("monte carlo coverage is deterministic across worker counts") {
    auto cfg = ExperimentConfig::from_json(markov_json(6));
    cfg.threads = 1;
    const auto one = run_coverage_sim(cfg);
    cfg.threads = 3;
    const auto three = run_coverage_sim(cfg);
    CHECK(one.empirical_coverage == three.empirical_coverage);
    CHECK(one.trials == 4000);
    CHECK(one.standard_error > 0.0);
}

TEST_CASE("monte carlo agrees with the exact computation") {
    auto cfg = ExperimentConfig::from_json(markov_json(6));
    cfg.trials = 200000;
    const auto report = run_coverage_sim(cfg);
    const double exact = run_exact_coverage(cfg.process, finite_score_for(cfg.score, 2),
                                            6, 0.25, PredictionRule::Mode::pretrained,
                                            0, true);
    CHECK(std::abs(report.empirical_coverage - exact) < 4.0 * report.standard_error);
}

TEST_CASE("exact coverage agrees with the brute-force rank count") {
    const auto spec = stay_chain(0.8, 3);
    const auto law = oracle::enumerate_markov(spec, 4);
    const auto score = finite_rank_score(2);
    for (const bool jitter : {true, false}) {
        const double exact = run_exact_coverage(ProcessSpec{spec}, score, 3, 0.4,
                                                PredictionRule::Mode::pretrained, 0,
                                                jitter);
        const double brute = oracle::exact_coverage_rank_count(law, score, 0.4, jitter);
        CHECK(exact == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("exact coverage saturates when the level exceeds one") {
    // m_cal = 3 and alpha = 0.1: level 0.9 * 4/3 > 1, so the set is everything.
    const double c = run_exact_coverage(ProcessSpec{stay_chain(0.8, 3)},
                                        finite_rank_score(2), 3, 0.1,
                                        PredictionRule::Mode::pretrained, 0, true);
    CHECK(c == 1.0);
}

TEST_CASE("coverage grid output") {
    const auto rows = run_figure1({0}, {25}, 0.1, 2000, 11);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].t == 0);
    CHECK(rows[0].n == 25);
    // iid case: the lower bound is exactly 1 - alpha.
    CHECK(rows[0].lower_bound == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(rows[0].upper_bound >= rows[0].lower_bound);
    CHECK(rows[0].coverage > 0.8);

    const std::string csv = figure1_csv(rows);
    CHECK(csv.rfind("t,n,coverage,stderr,lower_bound,upper_bound", 0) == 0);
    std::istringstream lines(csv);
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 2);
}

TEST_CASE("history parsing") {
    const auto rows = parse_history_csv("x,y\n0.5,1.5\n1.0,2.0\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].x == doctest::Approx(1.0));
    CHECK(rows[1].y == doctest::Approx(2.0));

    CHECK_THROWS_WITH_AS((void)parse_history_csv(""), "malformed CSV: empty input",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_history_csv("x,y\n0.5 1.5\n"),
                         "malformed CSV: missing comma on line 2",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)parse_history_csv("x,y\n0.5,oops\n"),
                         "non-numeric cell on line 2", std::invalid_argument);
    // A blank response marks a covariate-only row.
    const auto tail = parse_history_csv("x,y\n0.5,1.5\n0.7,\n");
    CHECK(std::isnan(tail[1].y));
}

TEST_CASE("prediction on a constant series collapses to a point") {
    std::string csv = "x,y\n";
    for (int i = 0; i < 10; ++i) csv += "0.0,3.0\n";
    csv += "0.0,\n";  // test covariate
    PredictOptions opt;
    opt.alpha = 0.5;
    opt.pretrained_f = [](double) { return 3.0; };
    const auto result = predict_next(csv, opt);
    CHECK(result.m_cal == 10);
    CHECK(result.point_prediction == doctest::Approx(3.0));
    CHECK(result.interval.lo == doctest::Approx(3.0));
    CHECK(result.interval.hi == doctest::Approx(3.0));
}

TEST_CASE("prediction with a tiny alpha is unbounded") {
    std::string csv = "x,y\n";
    for (int i = 0; i < 10; ++i) csv += "0.0," + std::to_string(i) + "\n";
    csv += "0.0,\n";
    PredictOptions opt;
    opt.alpha = 0.01;  // level 0.99 * 11/10 > 1
    opt.pretrained_f = [](double) { return 0.0; };
    const auto result = predict_next(csv, opt);
    CHECK(result.interval.unbounded());
}

TEST_CASE("split prediction trains on the leading block") {
    // y = 2 + 3x with mild deviations in the calibration half.
    std::string csv = "x,y\n";
    for (int i = 0; i < 20; ++i) {
        const double x = 0.05 * i;
        const double bump = (i >= 10) ? 0.01 * (i % 3) : 0.0;
        csv += std::to_string(x) + "," + std::to_string(2.0 + 3.0 * x + bump) + "\n";
    }
    csv += "0.5,\n";
    PredictOptions opt;
    opt.alpha = 0.2;
    const auto result = predict_next(csv, opt);
    CHECK(result.m_cal == 10);
    CHECK(result.point_prediction == doctest::Approx(3.5).epsilon(1e-3));
    CHECK(result.interval.lo <= 3.5);
    CHECK(result.interval.hi >= 3.5);
    CHECK(result.interval.hi - result.interval.lo < 0.2);

    CHECK_THROWS_WITH_AS((void)predict_next("x,y\n1.0,2.0\n", opt),
                         "insufficient history", std::invalid_argument);
}

TEST_CASE("coverage report serializes its inputs and findings") {
    auto cfg = ExperimentConfig::from_json(markov_json(6));
    cfg.trials = 2000;
    const auto report = run_coverage_sim(cfg);
    const auto j = report.to_json();
    CHECK(j["empirical_coverage"].get<double>() == report.empirical_coverage);
    CHECK(j["trials"].get<std::size_t>() == 2000);
    CHECK(j["config"]["process"]["type"] == "markov");
    CHECK(j["bounds"].is_array());
    // Small finite chain: the exact switch-coefficient bound is attached.
    REQUIRE(!report.bounds.empty());
    for (const auto& b : report.bounds) {
        CHECK(b.satisfied);
    }
}
