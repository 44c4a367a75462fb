#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "tsconf/bounds.hpp"
#include "tsconf/dependence.hpp"
#include "tsconf/harness.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << text;
}

json load_config(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("--config is required");
    return json::parse(read_file(path));
}

/// Shared flags; subcommand values override the config file.
struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> jitter;  // "on" | "off"
    int threads = 0;

    void attach(CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", config_path, "JSON config file");
        if (needs_config) c->required();
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--format", format, "output format: csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--seed", seed, "master seed override");
        cmd->add_option("--trials", trials, "trial count override");
        cmd->add_option("--jitter", jitter, "tie-breaking jitter: on|off")
            ->check(CLI::IsMember({"on", "off"}));
        cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    void apply_overrides(tsconf::ExperimentConfig& cfg) const {
        if (seed) cfg.master_seed = *seed;
        if (trials) cfg.trials = *trials;
        if (jitter) cfg.jitter = *jitter == "on";
        if (threads > 0) cfg.threads = threads;
    }
};

std::string report_csv(const tsconf::CoverageReport& report) {
    std::ostringstream out;
    out.precision(10);
    out << "coverage,trials,stderr";
    for (const auto& b : report.bounds) out << "," << b.name;
    out << "\n"
        << report.empirical_coverage << "," << report.trials << ","
        << report.standard_error;
    for (const auto& b : report.bounds) out << "," << b.value;
    out << "\n";
    return out.str();
}

tsconf::ProcessSpec process_from_json(const json& j) {
    json wrapper;
    wrapper["process"] = j;
    // Reuse the experiment-config parser for the process block alone.
    wrapper["trials"] = 1;
    return tsconf::ExperimentConfig::from_json(wrapper).process;
}

int cmd_coverage_sim(const CommonOpts& opts) {
    auto cfg = tsconf::ExperimentConfig::from_json(load_config(opts.config_path));
    opts.apply_overrides(cfg);
    const auto report = tsconf::run_coverage_sim(cfg);
    write_output(opts.format == "csv" ? report_csv(report) : report.to_json().dump(2),
                 opts.out_path);
    return 0;
}

int cmd_exact_coverage(const CommonOpts& opts) {
    const json j = load_config(opts.config_path);
    auto cfg = tsconf::ExperimentConfig::from_json(j);
    bool jitter = j.value("jitter", true);
    if (opts.jitter) jitter = *opts.jitter == "on";
    const auto* markov = std::get_if<tsconf::FiniteMarkovSpec>(&cfg.process);
    const auto* cyclic = std::get_if<tsconf::CyclicMixtureSpec>(&cfg.process);
    if (markov == nullptr && cyclic == nullptr) {
        throw std::invalid_argument("exact coverage requires a finite process");
    }
    const std::size_t alphabet = markov != nullptr ? markov->alphabet : cyclic->K;
    const auto score = tsconf::finite_score_for(cfg.score, alphabet);
    const double coverage = tsconf::run_exact_coverage(
        cfg.process, score, cfg.n, cfg.alpha, cfg.mode, cfg.n0, jitter);
    json out;
    out["exact_coverage"] = coverage;
    out["jitter"] = jitter;
    out["config"] = cfg.echo();
    write_output(out.dump(2), opts.out_path);
    return 0;
}

int cmd_switch_exact(const CommonOpts& opts) {
    const json j = load_config(opts.config_path);
    const auto process = process_from_json(j.contains("process") ? j.at("process") : j);
    const std::size_t n = std::visit([](const auto& s) { return s.n; }, process);
    const auto joint = std::visit(
        [n](const auto& spec) -> tsconf::FiniteDistribution {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, tsconf::MAProcessSpec>) {
                throw std::invalid_argument(
                    "switch coefficients require a finite process");
            } else {
                return tsconf::joint_pmf(spec, n + 1);
            }
        },
        process);
    const auto table = tsconf::compute_coefficients(joint);
    if (opts.format == "csv") {
        write_output(table.psi_csv() + "\n" + table.beta_csv(), opts.out_path);
    } else {
        write_output(table.to_json().dump(2), opts.out_path);
    }
    return 0;
}

int cmd_bounds(const CommonOpts& opts) {
    const json j = load_config(opts.config_path);
    const double alpha = j.at("alpha");
    const int L = j.value("L", 0);
    json out;
    if (j.contains("psi_bar_s")) {
        const std::size_t n = j.at("n");
        const auto table = j.at("psi_bar_s").get<std::vector<double>>();
        out["pretrained_lower"] = tsconf::thm1_lower(alpha, n, L, table).to_json();
        out["overcoverage_upper"] = tsconf::thm3_upper(alpha, n, L, table).to_json();
    }
    if (j.contains("beta")) {
        const auto beta = j.at("beta").get<std::vector<double>>();
        if (j.contains("n")) {
            out["mixing_lower"] =
                tsconf::cor1_lower(alpha, j.at("n").get<std::size_t>(), L, beta)
                    .to_json();
        }
        if (j.contains("n1")) {
            out["split_mixing_lower"] =
                tsconf::cor2_split_lower(alpha, j.at("n1").get<std::size_t>(), L, beta)
                    .to_json();
        }
    }
    if (j.contains("psi_split")) {
        const auto table = j.at("psi_split").get<std::vector<std::vector<double>>>();
        out["split_lower"] =
            tsconf::thm4_split_lower(alpha, j.at("n1").get<std::size_t>(), L, table)
                .to_json();
    }
    if (j.contains("cyclic")) {
        const auto& c = j.at("cyclic");
        out["adversarial_ceiling"] = tsconf::thm2_ceiling(
            alpha, j.at("n").get<std::size_t>(), c.at("b"), c.at("K"));
    }
    if (out.empty()) {
        throw std::invalid_argument(
            "config must supply psi_bar_s, beta, psi_split, or cyclic");
    }
    write_output(out.dump(2), opts.out_path);
    return 0;
}

int cmd_figure1(const CommonOpts& opts) {
    std::vector<int> t_values = {0, 1, 2, 4, 8};
    std::vector<std::size_t> n_values = {25, 50, 100, 200, 400};
    double alpha = 0.1;
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    if (!opts.config_path.empty()) {
        const json j = load_config(opts.config_path);
        t_values = j.value("t_values", t_values);
        n_values = j.value("n_values", n_values);
        alpha = j.value("alpha", alpha);
        trials = j.value("trials", trials);
        seed = j.value("seed", seed);
    }
    if (opts.trials) trials = *opts.trials;
    if (opts.seed) seed = *opts.seed;
    const auto rows =
        tsconf::run_figure1(t_values, n_values, alpha, trials, seed, opts.threads);
    if (opts.format == "json") {
        json out = json::array();
        for (const auto& row : rows) {
            out.push_back({{"t", row.t},
                           {"n", row.n},
                           {"coverage", row.coverage},
                           {"stderr", row.standard_error},
                           {"lower_bound", row.lower_bound},
                           {"upper_bound", row.upper_bound}});
        }
        write_output(out.dump(2), opts.out_path);
    } else {
        write_output(tsconf::figure1_csv(rows), opts.out_path);
    }
    return 0;
}

int cmd_thm2(const CommonOpts& opts, double alpha, std::size_t n, double b,
             std::size_t big_k) {
    std::size_t trials = opts.trials.value_or(1000000);
    std::uint64_t seed = opts.seed.value_or(1);
    const auto report =
        tsconf::run_thm2_experiment(alpha, n, b, big_k, trials, seed, opts.threads);
    write_output(opts.format == "csv" ? report_csv(report) : report.to_json().dump(2),
                 opts.out_path);
    return 0;
}

int cmd_verify(const CommonOpts& opts) {
    const std::uint64_t seed = opts.seed.value_or(20260826ULL);
    const auto results = tsconf::run_verification_suite(seed, opts.threads);
    const json summary = tsconf::verification_to_json(results);
    write_output(summary.dump(2), opts.out_path);
    for (const auto& r : results) {
        std::cerr << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.passed) std::cerr << " — " << r.details;
        std::cerr << "\n";
    }
    return summary.at("passed").get<bool>() ? 0 : 2;
}

int cmd_predict(const CommonOpts& opts, const std::string& history_path, double alpha,
                int memory, std::size_t n0, const std::string& beta_path) {
    tsconf::PredictOptions options;
    options.alpha = alpha;
    options.memory = memory;
    options.n0 = n0;
    if (!beta_path.empty()) {
        const json j = json::parse(read_file(beta_path));
        options.beta_table = j.at("beta").get<std::vector<double>>();
    }
    const auto result = tsconf::predict_next(read_file(history_path), options);
    write_output(result.to_json().dump(2), opts.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal prediction for temporally dependent series"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    auto* sim = app.add_subcommand("coverage-sim", "Monte Carlo coverage experiment");
    sim_opts.attach(sim, true);

    CommonOpts exact_opts;
    auto* exact = app.add_subcommand("exact-coverage",
                                     "exact coverage on a finite process");
    exact_opts.attach(exact, true);

    CommonOpts switch_opts;
    auto* sw = app.add_subcommand("switch-exact",
                                  "exact switch and mixing coefficient tables");
    switch_opts.attach(sw, true);

    CommonOpts bounds_opts;
    auto* bounds = app.add_subcommand("bounds", "evaluate coverage bounds from tables");
    bounds_opts.attach(bounds, true);

    CommonOpts fig_opts;
    auto* fig = app.add_subcommand("figure1", "coverage grid over (t, n) with bounds");
    fig_opts.attach(fig, false);

    CommonOpts thm2_opts;
    double thm2_alpha = 0.1;
    double thm2_b = 1.0;
    std::size_t thm2_n = 9;
    std::size_t thm2_k = 10000;
    auto* thm2 = app.add_subcommand("thm2", "adversarial cyclic-mixture experiment");
    thm2_opts.attach(thm2, false);
    thm2->add_option("--alpha", thm2_alpha, "miscoverage level");
    thm2->add_option("--n", thm2_n, "series length n");
    thm2->add_option("--b", thm2_b, "cyclic mixture weight (times 4)");
    thm2->add_option("--K", thm2_k, "number of atoms");

    CommonOpts verify_opts;
    auto* verify = app.add_subcommand("verify", "run the full verification suite");
    verify_opts.attach(verify, false);

    CommonOpts predict_opts;
    std::string history_path;
    std::string beta_path;
    double predict_alpha = 0.1;
    int predict_memory = 0;
    std::size_t predict_n0 = 0;
    auto* predict = app.add_subcommand("predict",
                                       "prediction interval from a CSV history");
    predict_opts.attach(predict, false);
    predict->add_option("--history", history_path, "CSV file of x,y rows")->required();
    predict->add_option("--alpha", predict_alpha, "miscoverage level");
    predict->add_option("--memory", predict_memory, "autoregressive memory L");
    predict->add_option("--n0", predict_n0, "training block length (0 = half)");
    predict->add_option("--beta-table", beta_path,
                        "JSON file with a {\"beta\": [...]} mixing table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_coverage_sim(sim_opts);
        if (exact->parsed()) return cmd_exact_coverage(exact_opts);
        if (sw->parsed()) return cmd_switch_exact(switch_opts);
        if (bounds->parsed()) return cmd_bounds(bounds_opts);
        if (fig->parsed()) return cmd_figure1(fig_opts);
        if (thm2->parsed()) return cmd_thm2(thm2_opts, thm2_alpha, thm2_n, thm2_b, thm2_k);
        if (verify->parsed()) return cmd_verify(verify_opts);
        if (predict->parsed()) {
            return cmd_predict(predict_opts, history_path, predict_alpha,
                               predict_memory, predict_n0, beta_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
