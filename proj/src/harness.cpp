#include "tsconf/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tsconf/quantile.hpp"
#include "tsconf/rng.hpp"

namespace tsconf {

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/**
 * Runs trials 0..trials-1 across workers and counts successes. Each worker
 * builds its own closure (and scratch buffers) via the factory; trial i
 * always draws from stream (seed, i), so the count is independent of the
 * worker layout.
 */
std::size_t parallel_count(
    std::size_t trials, int threads,
    const std::function<std::function<bool(std::uint64_t)>()>& make_trial) {
    const int workers = std::min<int>(resolve_threads(threads),
                                      static_cast<int>(std::max<std::size_t>(trials, 1)));
    if (workers <= 1) {
        auto trial = make_trial();
        std::size_t covered = 0;
        for (std::uint64_t i = 0; i < trials; ++i) {
            covered += trial(i) ? 1 : 0;
        }
        return covered;
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(workers), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            auto trial = make_trial();
            std::size_t covered = 0;
            for (std::uint64_t i = static_cast<std::uint64_t>(w); i < trials;
                 i += static_cast<std::uint64_t>(workers)) {
                covered += trial(i) ? 1 : 0;
            }
            counts[static_cast<std::size_t>(w)] = covered;
        });
    }
    for (auto& t : pool) t.join();
    std::size_t total = 0;
    for (const std::size_t c : counts) total += c;
    return total;
}

double standard_error(double p_hat, std::size_t trials) {
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

/// Threshold comparison for a calibration score list; handles level > 1.
bool covered_by_threshold(std::span<const double> calibration, double level,
                          double test_score) {
    if (level > 1.0) return true;
    const std::size_t r = quantile_rank(calibration.size(), level);
    // Count strictly smaller scores instead of materializing the order
    // statistic: test <= v_(r) iff fewer than r scores lie strictly below.
    std::size_t below = 0;
    for (const double s : calibration) {
        if (s < test_score) ++below;
    }
    return below + 1 <= r;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha must be in (0,1)");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (mode == PredictionRule::Mode::split && score.kind != ScoreSpec::Kind::trained_ar) {
        throw std::invalid_argument("split mode requires a training algorithm score");
    }
    if (score.kind == ScoreSpec::Kind::trained_ar &&
        mode != PredictionRule::Mode::split) {
        throw std::invalid_argument("trained score requires split mode");
    }
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if (spec.n != n) {
                throw std::invalid_argument("process length does not match config n");
            }
            if constexpr (std::is_same_v<T, CyclicMixtureSpec>) {
                spec.validate();
            } else if constexpr (std::is_same_v<T, FiniteMarkovSpec>) {
                spec.validate();
            } else {
                if (spec.order < 0 || !spec.f || !spec.covariate_law) {
                    throw std::invalid_argument("invalid MA process spec");
                }
            }
        },
        process);
}

nlohmann::json ExperimentConfig::echo() const {
    nlohmann::json j;
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, MAProcessSpec>) {
                j["process"] = {{"type", "ma"}, {"t", spec.order}, {"n", spec.n}};
            } else if constexpr (std::is_same_v<T, CyclicMixtureSpec>) {
                j["process"] = {
                    {"type", "cyclic"}, {"K", spec.K}, {"b", spec.b}, {"n", spec.n}};
            } else {
                j["process"] = {{"type", "markov"},
                                {"alphabet", spec.alphabet},
                                {"transition", spec.transition},
                                {"initial", spec.initial},
                                {"n", spec.n}};
            }
        },
        process);
    const char* kind = nullptr;
    switch (score.kind) {
        case ScoreSpec::Kind::residual_true_f: kind = "residual_true_f"; break;
        case ScoreSpec::Kind::rank: kind = "rank"; break;
        case ScoreSpec::Kind::match: kind = "match"; break;
        case ScoreSpec::Kind::trained_ar: kind = "trained_ar"; break;
    }
    j["score"] = {{"kind", kind}, {"memory", score.memory}};
    j["mode"] = mode == PredictionRule::Mode::pretrained ? "pretrained" : "split";
    j["n"] = n;
    j["n0"] = split_point();
    j["alpha"] = alpha;
    j["trials"] = trials;
    j["seed"] = master_seed;
    j["jitter"] = jitter;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    const auto& proc = j.at("process");
    const std::string type = proc.at("type");
    const std::size_t n = proc.at("n");
    if (type == "ma") {
        cfg.process = MAProcessSpec::with_defaults(proc.at("t"), n);
    } else if (type == "cyclic") {
        cfg.process = CyclicMixtureSpec::with_defaults(proc.at("K"), proc.at("b"), n);
    } else if (type == "markov") {
        FiniteMarkovSpec spec;
        spec.alphabet = proc.at("alphabet");
        spec.n = n;
        const auto& rows = proc.at("transition");
        for (const auto& row : rows) {
            for (const auto& v : row) {
                spec.transition.push_back(v);
            }
        }
        if (proc.contains("initial") && proc.at("initial").is_array()) {
            spec.initial = proc.at("initial").get<std::vector<double>>();
        } else {
            spec.initial = stationary_distribution(spec.alphabet, spec.transition);
        }
        cfg.process = spec;
    } else {
        throw std::invalid_argument("unknown process type: " + type);
    }
    cfg.n = n;
    if (j.contains("score")) {
        const std::string kind = j.at("score").value("kind", "residual_true_f");
        if (kind == "residual_true_f") {
            cfg.score.kind = ScoreSpec::Kind::residual_true_f;
        } else if (kind == "rank") {
            cfg.score.kind = ScoreSpec::Kind::rank;
        } else if (kind == "match") {
            cfg.score.kind = ScoreSpec::Kind::match;
        } else if (kind == "trained_ar") {
            cfg.score.kind = ScoreSpec::Kind::trained_ar;
        } else {
            throw std::invalid_argument("unknown score kind: " + kind);
        }
        cfg.score.memory = j.at("score").value("memory", 0);
    }
    const std::string mode = j.value("mode", "pretrained");
    if (mode == "pretrained") {
        cfg.mode = PredictionRule::Mode::pretrained;
    } else if (mode == "split") {
        cfg.mode = PredictionRule::Mode::split;
    } else {
        throw std::invalid_argument("unknown mode: " + mode);
    }
    cfg.n0 = j.value("n0", 0);
    cfg.alpha = j.value("alpha", 0.1);
    cfg.trials = j.value("trials", std::size_t{1});
    cfg.master_seed = j.value("seed", std::uint64_t{0});
    cfg.jitter = j.value("jitter", false);
    cfg.threads = j.value("threads", 0);
    return cfg;
}

nlohmann::json CoverageReport::to_json() const {
    nlohmann::json j;
    j["empirical_coverage"] = empirical_coverage;
    j["trials"] = trials;
    j["standard_error"] = standard_error;
    j["config"] = config_echo;
    auto& list = j["bounds"] = nlohmann::json::array();
    for (const auto& b : bounds) {
        list.push_back({{"name", b.name},
                        {"value", b.value},
                        {"side", b.is_lower ? "lower" : "upper"},
                        {"satisfied", b.satisfied}});
    }
    j["wall_time_s"] = wall_time_s;
    return j;
}

FiniteScore finite_score_for(const ScoreSpec& score, std::size_t alphabet) {
    switch (score.kind) {
        case ScoreSpec::Kind::rank:
            return finite_rank_score(alphabet);
        case ScoreSpec::Kind::match:
            return finite_match_score();
        default:
            throw std::invalid_argument("score has no finite-alphabet form");
    }
}

namespace {

/// MA + pretrained true-f residual: scores reduce to |eps_i|.
std::function<std::function<bool(std::uint64_t)>()> ma_residual_trial_factory(
    const MAProcessSpec& spec, double alpha, std::uint64_t seed) {
    const auto t = static_cast<std::size_t>(spec.order);
    const std::size_t n = spec.n;
    const double level = conformal_level(alpha, n);
    return [t, n, level, seed] {
        auto noise = std::make_shared<std::vector<double>>(n + 1 + t);
        auto scores = std::make_shared<std::vector<double>>(n + 1);
        auto scratch = std::make_shared<std::vector<double>>(n);
        return [t, n, level, seed, noise, scores, scratch](std::uint64_t trial) {
            RngStream rng(seed, trial);
            for (double& w : *noise) {
                w = rng.gaussian();
            }
            double window = 0.0;
            for (std::size_t j = 0; j <= t; ++j) {
                window += (*noise)[j];
            }
            (*scores)[0] = std::abs(window);
            for (std::size_t i = 1; i <= n; ++i) {
                window += (*noise)[i + t] - (*noise)[i - 1];
                (*scores)[i] = std::abs(window);
            }
            if (level > 1.0) return true;
            const std::size_t r = quantile_rank(n, level);
            std::copy(scores->begin(), scores->begin() + static_cast<long>(n),
                      scratch->begin());
            std::nth_element(scratch->begin(), scratch->begin() + static_cast<long>(r - 1),
                             scratch->end());
            return (*scores)[n] <= (*scratch)[r - 1];
        };
    };
}

std::function<std::function<bool(std::uint64_t)>()> generic_trial_factory(
    const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.master_seed;
    const bool jitter = cfg.jitter;
    const double alpha = cfg.alpha;
    const bool split = cfg.mode == PredictionRule::Mode::split;
    const std::size_t n = cfg.n;
    const std::size_t n0 = split ? cfg.split_point() : 0;

    // Pretrained scores are resolved once and shared read-only.
    std::shared_ptr<const ScoreFunction> pretrained;
    TrainingAlgorithm trainer;
    switch (cfg.score.kind) {
        case ScoreSpec::Kind::residual_true_f: {
            const auto& ma = std::get<MAProcessSpec>(cfg.process);
            pretrained = std::make_shared<ScoreFunction>(residual_score_pretrained(ma.f));
            break;
        }
        case ScoreSpec::Kind::rank: {
            std::vector<DataPoint> points;
            if (const auto* cyclic = std::get_if<CyclicMixtureSpec>(&cfg.process)) {
                points = cyclic->z_points;
            } else if (const auto* markov = std::get_if<FiniteMarkovSpec>(&cfg.process)) {
                for (std::size_t a = 0; a < markov->alphabet; ++a) {
                    points.push_back({static_cast<double>(a), static_cast<double>(a)});
                }
            } else {
                throw std::invalid_argument("rank score needs a finite process");
            }
            pretrained = std::make_shared<ScoreFunction>(rank_score(std::move(points)));
            break;
        }
        case ScoreSpec::Kind::match: {
            ScoreFunction s;
            s.memory = 1;
            s.eval = [](const DataPoint& z, std::span<const DataPoint> context) {
                return z == context[0] ? 1.0 : 0.0;
            };
            pretrained = std::make_shared<ScoreFunction>(std::move(s));
            break;
        }
        case ScoreSpec::Kind::trained_ar:
            trainer = ar_residual_trainer(cfg.score.memory);
            break;
    }

    ProcessSpec process = cfg.process;
    return [=] {
        auto scores = std::make_shared<std::vector<double>>();
        return [=](std::uint64_t trial) {
            RngStream rng(seed, trial);
            TimeSeries series = std::visit(
                [&rng](const auto& spec) -> TimeSeries {
                    using T = std::decay_t<decltype(spec)>;
                    if constexpr (std::is_same_v<T, MAProcessSpec>) {
                        return sample_ma(spec, rng);
                    } else if constexpr (std::is_same_v<T, CyclicMixtureSpec>) {
                        return sample_cyclic_mixture(spec, rng);
                    } else {
                        return sample_markov(spec, rng);
                    }
                },
                process);
            ScoreFunction local;
            const ScoreFunction* s = pretrained.get();
            if (trainer) {
                local = trainer(std::span<const DataPoint>(series.points).subspan(0, n0));
                s = &local;
            }
            const auto L = static_cast<std::size_t>(s->memory);
            const std::size_t from = (split ? n0 : 0) + L + 1;
            score_series_into(*s, series.points, from, *scores);
            if (jitter) {
                for (double& v : *scores) {
                    v += 1e-9 * rng.uniform();
                }
            }
            const std::size_t m_cal = scores->size() - 1;
            if (m_cal == 0) throw std::invalid_argument("no calibration scores");
            const double level = conformal_level(alpha, m_cal);
            return covered_by_threshold(
                std::span<const double>(*scores).subspan(0, m_cal), level,
                scores->back());
        };
    };
}

}  // namespace

CoverageReport run_coverage_sim(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    std::function<std::function<bool(std::uint64_t)>()> factory;
    const auto* ma = std::get_if<MAProcessSpec>(&cfg.process);
    if (ma != nullptr && cfg.score.kind == ScoreSpec::Kind::residual_true_f &&
        cfg.mode == PredictionRule::Mode::pretrained && !cfg.jitter) {
        factory = ma_residual_trial_factory(*ma, cfg.alpha, cfg.master_seed);
    } else {
        factory = generic_trial_factory(cfg);
    }
    const std::size_t covered = parallel_count(cfg.trials, cfg.threads, factory);

    CoverageReport report;
    report.trials = cfg.trials;
    report.empirical_coverage =
        static_cast<double>(covered) / static_cast<double>(cfg.trials);
    report.standard_error = standard_error(report.empirical_coverage, cfg.trials);
    report.config_echo = cfg.echo();

    const double slack = 3.0 * report.standard_error;
    auto add_bound = [&](std::string name, double value, bool is_lower) {
        BoundComparison cmp;
        cmp.name = std::move(name);
        cmp.value = value;
        cmp.is_lower = is_lower;
        cmp.satisfied = is_lower ? report.empirical_coverage >= value - slack
                                 : report.empirical_coverage <= value + slack;
        report.bounds.push_back(cmp);
    };

    if (ma != nullptr && cfg.mode == PredictionRule::Mode::pretrained &&
        cfg.score.kind == ScoreSpec::Kind::residual_true_f) {
        const auto beta = analytic_beta_ma(ma->order, cfg.n);
        add_bound("cor1_lower", cor1_lower(cfg.alpha, cfg.n, 0, beta).bound_value, true);
        std::vector<double> psi_bar_s(cfg.n + 1);
        for (std::size_t tau = 0; tau <= cfg.n; ++tau) {
            psi_bar_s[tau] = std::min(2.0 * beta[tau], 1.0);
        }
        add_bound("thm3_upper", thm3_upper(cfg.alpha, cfg.n, 0, psi_bar_s).bound_value,
                  false);
    } else if (ma != nullptr && cfg.mode == PredictionRule::Mode::split) {
        const std::size_t n1 = cfg.n - cfg.split_point();
        const int L = cfg.score.memory;
        if (n1 >= static_cast<std::size_t>(2 * L)) {
            const auto beta = analytic_beta_ma(ma->order, n1);
            add_bound("cor2_split_lower",
                      cor2_split_lower(cfg.alpha, n1, L, beta).bound_value, true);
        }
    } else if (const auto* cyc = std::get_if<CyclicMixtureSpec>(&cfg.process)) {
        const double target = (1.0 - cfg.alpha) * (static_cast<double>(cfg.n) + 1.0);
        if (std::abs(target - std::round(target)) <= 1e-9) {
            add_bound("thm2_ceiling",
                      thm2_ceiling(cfg.alpha, cfg.n, cyc->b,
                                   static_cast<double>(cyc->K)),
                      false);
        }
    } else if (const auto* markov = std::get_if<FiniteMarkovSpec>(&cfg.process)) {
        // Exact switch coefficients when the state space is small enough.
        double cells = 1.0;
        for (std::size_t i = 0; i <= cfg.n; ++i) cells *= static_cast<double>(markov->alphabet);
        if (cells <= 100000.0 && cfg.mode == PredictionRule::Mode::pretrained &&
            (cfg.score.kind == ScoreSpec::Kind::rank ||
             cfg.score.kind == ScoreSpec::Kind::match)) {
            const auto z_joint = joint_pmf(*markov, cfg.n + 1);
            const auto s_joint = score_pushforward(
                z_joint, finite_score_for(cfg.score, markov->alphabet));
            const std::size_t m = s_joint.length();
            std::vector<double> psi_bar_s(m);
            for (std::size_t tau = 0; tau < m; ++tau) {
                std::vector<double> column(m);
                for (std::size_t k = 1; k <= m; ++k) {
                    column[k - 1] = psi_k_tau(s_joint, k, tau);
                }
                psi_bar_s[tau] = psi_bar(column);
            }
            const int L = cfg.score.kind == ScoreSpec::Kind::match ? 1 : 0;
            add_bound("thm1_lower",
                      thm1_lower(cfg.alpha, cfg.n, L, psi_bar_s).bound_value, true);
            if (cfg.jitter) {
                add_bound("thm3_upper",
                          thm3_upper(cfg.alpha, cfg.n, L, psi_bar_s).bound_value, false);
            }
        }
    }

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

double run_exact_coverage(const ProcessSpec& process, const FiniteScore& score,
                          std::size_t n, double alpha, PredictionRule::Mode mode,
                          std::size_t n0, bool jitter) {
    const FiniteDistribution joint = std::visit(
        [n](const auto& spec) -> FiniteDistribution {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, MAProcessSpec>) {
                throw std::invalid_argument("exact coverage requires a finite process");
            } else {
                return joint_pmf(spec, n + 1);
            }
        },
        process);

    const auto L = static_cast<std::size_t>(score.memory);
    const std::size_t first_cal =
        (mode == PredictionRule::Mode::split ? (n0 == 0 ? n / 2 : n0) : 0) + L + 1;
    if (first_cal > n) {
        throw std::invalid_argument("no calibration scores");
    }
    const std::size_t m_cal = n - first_cal + 1;
    const double level = conformal_level(alpha, m_cal);
    if (level > 1.0) {
        return 1.0;  // threshold is +infinity for every realization
    }
    const std::size_t r = quantile_rank(m_cal, level);

    double coverage = 0.0;
    std::vector<int> seq(n + 1);
    std::vector<int> context(L);
    std::vector<double> scores(n + 1 - L);
    for (std::size_t idx = 0; idx < joint.cells(); ++idx) {
        const double mass = joint.mass(idx);
        if (mass == 0.0) continue;
        joint.decode(idx, seq);
        for (std::size_t i = L; i <= n; ++i) {
            for (std::size_t j = 0; j < L; ++j) {
                context[j] = seq[i - 1 - j];
            }
            scores[i - L] = score.values[score.code(seq[i], context)];
        }
        const double test = scores.back();
        std::size_t below = 0;
        std::size_t tied = 0;
        for (std::size_t i = first_cal - L - 1; i + 1 < scores.size(); ++i) {
            if (scores[i] < test) ++below;
            if (scores[i] == test) ++tied;
        }
        if (jitter) {
            const double admissible = std::clamp(
                static_cast<double>(r) - static_cast<double>(below), 0.0,
                static_cast<double>(tied) + 1.0);
            coverage += mass * admissible / (static_cast<double>(tied) + 1.0);
        } else if (below + 1 <= r) {
            coverage += mass;
        }
    }
    return coverage;
}

std::vector<Figure1Row> run_figure1(const std::vector<int>& t_values,
                                    const std::vector<std::size_t>& n_values,
                                    double alpha, std::size_t trials,
                                    std::uint64_t seed, int threads) {
    std::vector<Figure1Row> rows;
    std::uint64_t cell = 0;
    for (const int t : t_values) {
        for (const std::size_t n : n_values) {
            ExperimentConfig cfg;
            cfg.process = MAProcessSpec::with_defaults(t, n);
            cfg.score.kind = ScoreSpec::Kind::residual_true_f;
            cfg.mode = PredictionRule::Mode::pretrained;
            cfg.n = n;
            cfg.alpha = alpha;
            cfg.trials = trials;
            cfg.master_seed = splitmix64(splitmix64(seed) ^ cell);
            cfg.threads = threads;
            const CoverageReport report = run_coverage_sim(cfg);
            Figure1Row row;
            row.t = t;
            row.n = n;
            row.coverage = report.empirical_coverage;
            row.standard_error = report.standard_error;
            for (const auto& b : report.bounds) {
                if (b.name == "cor1_lower") row.lower_bound = b.value;
                if (b.name == "thm3_upper") row.upper_bound = b.value;
            }
            rows.push_back(row);
            ++cell;
        }
    }
    return rows;
}

std::string figure1_csv(const std::vector<Figure1Row>& rows) {
    std::ostringstream out;
    out << "t,n,coverage,stderr,lower_bound,upper_bound\n";
    out.precision(10);
    for (const auto& row : rows) {
        out << row.t << "," << row.n << "," << row.coverage << "," << row.standard_error
            << "," << row.lower_bound << "," << row.upper_bound << "\n";
    }
    return out.str();
}

CoverageReport run_thm2_experiment(double alpha, std::size_t n, double b, std::size_t K,
                                   std::size_t trials, std::uint64_t seed, int threads) {
    const double ceiling = thm2_ceiling(alpha, n, b, static_cast<double>(K));
    ExperimentConfig cfg;
    cfg.process = CyclicMixtureSpec::with_defaults(K, b, n);
    cfg.score.kind = ScoreSpec::Kind::rank;
    cfg.mode = PredictionRule::Mode::pretrained;
    cfg.n = n;
    cfg.alpha = alpha;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.threads = threads;
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    const double level = conformal_level(alpha, n);
    auto factory = [=] {
        auto scores = std::make_shared<std::vector<double>>(n + 1);
        return [=](std::uint64_t trial) {
            RngStream rng(seed, trial);
            if (rng.uniform() < b / 4.0) {
                std::size_t j = rng.uniform_int(K);
                for (std::size_t i = 0; i <= n; ++i) {
                    (*scores)[i] = static_cast<double>(j);
                    j = (j + 1) % K;
                }
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    (*scores)[i] = static_cast<double>(rng.uniform_int(K));
                }
            }
            return covered_by_threshold(
                std::span<const double>(*scores).subspan(0, n), level, (*scores)[n]);
        };
    };
    const std::size_t covered = parallel_count(trials, threads, factory);

    CoverageReport report;
    report.trials = trials;
    report.empirical_coverage = static_cast<double>(covered) / static_cast<double>(trials);
    report.standard_error = standard_error(report.empirical_coverage, trials);
    report.config_echo = cfg.echo();
    BoundComparison cmp;
    cmp.name = "thm2_ceiling";
    cmp.value = ceiling;
    cmp.is_lower = false;
    cmp.satisfied =
        report.empirical_coverage <= ceiling + 3.0 * report.standard_error;
    report.bounds.push_back(cmp);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<DataPoint> parse_history_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("malformed CSV: empty input");
    }
    auto parse_cell = [](const std::string& cell, std::size_t line_no) {
        double value = 0.0;
        const char* first = cell.data();
        const char* last = cell.data() + cell.size();
        while (first != last && (*first == ' ' || *first == '\t')) ++first;
        while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' ||
                                 *(last - 1) == '\r')) --last;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            throw std::invalid_argument("non-numeric cell on line " +
                                        std::to_string(line_no));
        }
        return value;
    };
    std::vector<DataPoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("malformed CSV: missing comma on line " +
                                        std::to_string(line_no));
        }
        DataPoint z;
        z.x = parse_cell(line.substr(0, comma), line_no);
        const std::string y_cell = line.substr(comma + 1);
        const bool y_blank =
            y_cell.find_first_not_of(" \t\r") == std::string::npos;
        z.y = y_blank ? std::numeric_limits<double>::quiet_NaN()
                      : parse_cell(y_cell, line_no);
        points.push_back(z);
    }
    return points;
}

nlohmann::json PredictResult::to_json() const {
    nlohmann::json j;
    if (interval.empty) {
        j["interval"] = nullptr;
    } else {
        j["interval"] = {interval.lo, interval.hi};
    }
    j["unbounded"] = interval.unbounded();
    j["threshold"] = threshold;
    j["m_cal"] = m_cal;
    j["point_prediction"] = point_prediction;
    if (cor2_bound) {
        j["cor2_bound"] = *cor2_bound;
    }
    return j;
}

PredictResult predict_next(const std::string& csv_text, const PredictOptions& options) {
    const std::vector<DataPoint> rows = parse_history_csv(csv_text);
    if (rows.size() < 2) {
        throw std::invalid_argument("insufficient history");
    }
    const std::size_t n = rows.size() - 1;  // last row holds the test covariate
    const std::span<const DataPoint> history(rows.data(), n);
    const double test_x = rows.back().x;

    PredictionRule rule;
    std::size_t n1 = 0;
    if (options.pretrained_f) {
        rule = calibrate_pretrained(residual_score_pretrained(options.pretrained_f),
                                    history, options.alpha);
    } else {
        const std::size_t n0 = options.n0 == 0 ? n / 2 : options.n0;
        rule = calibrate_split(ar_residual_trainer(options.memory), history, n0,
                               options.alpha);
        n1 = n - n0;
    }
    PredictResult result;
    result.threshold = rule.threshold;
    result.m_cal = rule.m_cal;
    result.interval = interval_from_rule(rule, test_x, rule.context);
    result.point_prediction = rule.score_fn.predict(test_x, rule.context);
    if (!options.beta_table.empty() && n1 > 0) {
        result.cor2_bound =
            cor2_split_lower(options.alpha, n1, options.memory, options.beta_table)
                .bound_value;
    }
    return result;
}

nlohmann::json verification_to_json(const std::vector<CheckResult>& results) {
    nlohmann::json j;
    auto& list = j["checks"] = nlohmann::json::array();
    std::size_t failures = 0;
    for (const auto& r : results) {
        list.push_back({{"name", r.name}, {"passed", r.passed}, {"details", r.details}});
        if (!r.passed) ++failures;
    }
    j["total"] = results.size();
    j["failures"] = failures;
    j["passed"] = failures == 0;
    return j;
}

}  // namespace tsconf
