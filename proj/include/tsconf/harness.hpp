#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tsconf/bounds.hpp"
#include "tsconf/conformal.hpp"
#include "tsconf/dependence.hpp"
#include "tsconf/processes.hpp"
#include "tsconf/scoring.hpp"

#include "json.hpp"

namespace tsconf {

using ProcessSpec = std::variant<MAProcessSpec, CyclicMixtureSpec, FiniteMarkovSpec>;

/// Score selection for experiment configs.
struct ScoreSpec {
    enum class Kind {
        residual_true_f,  // pretrained |y - f(x)| with the process's own f
        rank,             // memoryless rank score over the process's atoms
        match,            // memory-1 indicator 1{z = z_{-1}} (finite processes)
        trained_ar,       // least-squares AR residual score (split mode)
    };
    Kind kind = Kind::residual_true_f;
    int memory = 0;  // for trained_ar
};

struct ExperimentConfig {
    ProcessSpec process;
    ScoreSpec score;
    PredictionRule::Mode mode = PredictionRule::Mode::pretrained;
    std::size_t n = 0;
    std::size_t n0 = 0;  // split point; 0 means floor(n/2)
    double alpha = 0.1;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    bool jitter = false;
    int threads = 0;  // 0 means hardware concurrency

    void validate() const;
    [[nodiscard]] std::size_t split_point() const { return n0 == 0 ? n / 2 : n0; }
    [[nodiscard]] nlohmann::json echo() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
};

struct BoundComparison {
    std::string name;
    double value = 0.0;
    bool is_lower = true;   // lower bounds compare coverage >= value - 3*se
    bool satisfied = true;
};

struct CoverageReport {
    double empirical_coverage = 0.0;
    std::size_t trials = 0;
    double standard_error = 0.0;
    nlohmann::json config_echo;
    std::vector<BoundComparison> bounds;
    double wall_time_s = 0.0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/**
 * Monte Carlo coverage estimate: per trial, samples a fresh series from
 * stream (master_seed, trial index), calibrates, and evaluates coverage at
 * index n+1. Deterministic for a given (config, seed) regardless of the
 * worker count.
 */
CoverageReport run_coverage_sim(const ExperimentConfig& cfg);

/**
 * Exact coverage probability on a finite process, by summing joint pmf mass
 * over the coverage event. With jitter on, ties are resolved by integrating
 * over the symmetric tie-breaking order (equivalent to adding iid
 * infinitesimal jitter to every score), which is also what the Monte Carlo
 * path simulates.
 */
double run_exact_coverage(const ProcessSpec& process, const FiniteScore& score,
                          std::size_t n, double alpha, PredictionRule::Mode mode,
                          std::size_t n0 = 0, bool jitter = true);

/// Resolve the experiment's finite score (rank / match) for exact paths.
FiniteScore finite_score_for(const ScoreSpec& score, std::size_t alphabet);

struct Figure1Row {
    int t = 0;
    std::size_t n = 0;
    double coverage = 0.0;
    double standard_error = 0.0;
    double lower_bound = 0.0;  // beta-mixing lower bound, analytic MA beta
    double upper_bound = 0.0;  // overcoverage bound, analytic MA beta
};

/**
 * Coverage of the pretrained true-f residual interval across a (t, n) grid
 * of MA processes, with the matching closed-form bounds per row.
 */
std::vector<Figure1Row> run_figure1(const std::vector<int>& t_values,
                                    const std::vector<std::size_t>& n_values,
                                    double alpha, std::size_t trials,
                                    std::uint64_t seed, int threads = 0);

std::string figure1_csv(const std::vector<Figure1Row>& rows);

/// Cyclic-mixture lower-bound experiment with the rank score.
CoverageReport run_thm2_experiment(double alpha, std::size_t n, double b, std::size_t K,
                                   std::size_t trials, std::uint64_t seed,
                                   int threads = 0);

struct PredictOptions {
    double alpha = 0.1;
    int memory = 0;
    std::size_t n0 = 0;  // 0 means floor(n/2)
    std::function<double(double)> pretrained_f;  // empty -> split AR training
    std::vector<double> beta_table;              // optional split mixing bound input
};

struct PredictResult {
    Interval interval;
    double threshold = 0.0;
    std::size_t m_cal = 0;
    double point_prediction = 0.0;
    std::optional<double> cor2_bound;

    [[nodiscard]] nlohmann::json to_json() const;
};

/**
 * Calibrates on a CSV history of (x, y) rows and predicts an interval for
 * the final row's covariate. The final row's response, if present, is
 * ignored.
 */
PredictResult predict_next(const std::string& csv_text, const PredictOptions& options);

/// Parses "x,y" CSV with a header; throws with a distinct message per defect.
std::vector<DataPoint> parse_history_csv(const std::string& csv_text);

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string details;
};

/**
 * Runs the full verification suite (module property checks plus the
 * acceptance criteria) and returns one result per check. Failures are data,
 * not errors.
 */
std::vector<CheckResult> run_verification_suite(std::uint64_t seed, int threads = 0);

nlohmann::json verification_to_json(const std::vector<CheckResult>& results);

}  // namespace tsconf
