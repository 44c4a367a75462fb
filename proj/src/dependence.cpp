#include "tsconf/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tsconf {

std::vector<std::size_t> deletion_index_map(std::size_t m, const DeletionSpec& spec) {
    const std::size_t k = spec.k;
    const std::size_t tau = spec.tau;
    if (k < 1 || k > m) {
        throw std::invalid_argument("deletion index k out of range");
    }
    if (tau > m - 1) {
        throw std::invalid_argument("deletion count tau out of range");
    }
    if (spec.variant != 0 && spec.variant != 1) {
        throw std::invalid_argument("deletion variant must be 0 or 1");
    }
    std::vector<std::size_t> idx;
    idx.reserve(m - tau);
    auto push_range = [&idx](std::size_t first, std::size_t last) {  // 1-based, inclusive
        for (std::size_t i = first; i <= last; ++i) {
            idx.push_back(i - 1);
        }
    };
    if (k + tau + 1 <= m) {  // 1 <= k <= m-1-tau
        if (spec.variant == 0) {
            push_range(1, m - tau - k);
            push_range(m - k + 1, m);
        } else {
            push_range(k + tau + 1, m);
            push_range(1, k);
        }
    } else {  // m-tau <= k <= m
        if (spec.variant == 0) {
            push_range(tau + 1, m);
        } else {
            push_range(k - m + tau + 1, k);
        }
    }
    return idx;
}

std::vector<std::size_t> split_deletion_index_map(const SplitDeletionSpec& spec) {
    const std::size_t n0 = spec.n0;
    const std::size_t n1 = spec.n1;
    const std::size_t n = n0 + n1;
    const std::size_t k = spec.k;
    const std::size_t tau = spec.tau;
    const std::size_t tau_star = spec.tau_star;
    if (n0 < 1 || n1 < 1) {
        throw std::invalid_argument("n0 and n1 must be positive");
    }
    if (tau + tau_star > n1) {
        throw std::invalid_argument("tau + tau_star exceeds calibration length");
    }
    if (k < 1 || k + tau_star > n1 + 1) {
        throw std::invalid_argument("split deletion index k out of range");
    }
    if (spec.variant != 0 && spec.variant != 1) {
        throw std::invalid_argument("deletion variant must be 0 or 1");
    }
    std::vector<std::size_t> idx;
    idx.reserve(n + 1 - tau - tau_star);
    auto push_range = [&idx](std::size_t first, std::size_t last) {  // 1-based, inclusive
        for (std::size_t i = first; i <= last; ++i) {
            idx.push_back(i - 1);
        }
    };
    push_range(1, n0);
    if (k + tau + tau_star <= n1) {  // lower range: 1 <= k <= n1-tau-tau_star
        if (spec.variant == 0) {
            push_range(n0 + tau_star + 1, n + 1 - k - tau);
            push_range(n + 2 - k, n + 1);
        } else {
            push_range(n0 + tau + tau_star + k + 1, n + 1);
            push_range(n0 + tau_star + 1, n0 + tau_star + k);
        }
    } else {  // upper range: n1-tau-tau_star < k <= n1+1-tau_star
        if (spec.variant == 0) {
            push_range(n0 + tau + tau_star + 1, n + 1);
        } else {
            push_range(n0 + k + tau + 2 * tau_star - n1, n0 + k + tau_star);
        }
    }
    return idx;
}

double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
    if (p.alphabet() != q.alphabet() || p.length() != q.length()) {
        throw std::invalid_argument("tv_distance requires matching shapes");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.cells(); ++i) {
        sum += std::abs(p.mass(i) - q.mass(i));
    }
    return 0.5 * sum;
}

FiniteDistribution pushforward_distribution(
    const FiniteDistribution& joint,
    const std::function<void(std::span<const int>, std::vector<int>&)>& map,
    std::size_t out_alphabet, std::size_t out_length) {
    FiniteDistribution out(out_alphabet, out_length);
    std::vector<int> seq(joint.length());
    std::vector<int> image;
    for (std::size_t idx = 0; idx < joint.cells(); ++idx) {
        const double mass = joint.mass(idx);
        if (mass == 0.0) continue;
        joint.decode(idx, seq);
        map(seq, image);
        if (image.size() != out_length) {
            throw std::invalid_argument("pushforward map produced wrong length");
        }
        out.mass(out.encode(image)) += mass;
    }
    return out;
}

FiniteScore finite_rank_score(std::size_t alphabet) {
    FiniteScore score;
    score.memory = 0;
    score.num_codes = alphabet;
    score.code = [](int state, std::span<const int>) {
        return static_cast<std::size_t>(state);
    };
    score.values.resize(alphabet);
    for (std::size_t a = 0; a < alphabet; ++a) {
        score.values[a] = static_cast<double>(a);
    }
    return score;
}

FiniteScore finite_match_score() {
    FiniteScore score;
    score.memory = 1;
    score.num_codes = 2;
    score.code = [](int state, std::span<const int> context) {
        return static_cast<std::size_t>(state == context[0] ? 1 : 0);
    };
    score.values = {0.0, 1.0};
    return score;
}

FiniteDistribution score_pushforward(const FiniteDistribution& z_joint,
                                     const FiniteScore& score) {
    const auto L = static_cast<std::size_t>(score.memory);
    if (z_joint.length() <= L) {
        throw std::invalid_argument("series too short for score memory");
    }
    const std::size_t out_len = z_joint.length() - L;
    auto map = [&score, L](std::span<const int> seq, std::vector<int>& image) {
        image.clear();
        std::vector<int> context(L);
        for (std::size_t i = L; i < seq.size(); ++i) {
            for (std::size_t j = 0; j < L; ++j) {
                context[j] = seq[i - 1 - j];
            }
            image.push_back(static_cast<int>(score.code(seq[i], context)));
        }
    };
    return pushforward_distribution(z_joint, map, score.num_codes, out_len);
}

double psi_k_tau(const FiniteDistribution& joint, std::size_t k, std::size_t tau) {
    const std::size_t m = joint.length();
    const auto law0 = joint.select(deletion_index_map(m, {k, tau, 0}));
    const auto law1 = joint.select(deletion_index_map(m, {k, tau, 1}));
    return tv_distance(law0, law1);
}

double psi_bar(std::span<const double> psi_column) {
    if (psi_column.empty()) {
        throw std::invalid_argument("incomplete psi column");
    }
    double sum = 0.0;
    for (const double v : psi_column) {
        sum += v;
    }
    return sum / static_cast<double>(psi_column.size());
}

double beta_mixing(const FiniteDistribution& joint, std::size_t tau) {
    const std::size_t n = joint.length() - 1;
    if (tau > n) {
        throw std::invalid_argument("lag tau out of range");
    }
    if (tau == n) {
        return 0.0;  // no valid split point; beta(n) = 0 by convention
    }
    double best = 0.0;
    for (std::size_t k = 1; k <= n - tau; ++k) {
        std::vector<std::size_t> both;
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t i = 0; i < k; ++i) {
            left.push_back(i);
            both.push_back(i);
        }
        for (std::size_t i = k + tau; i <= n; ++i) {
            right.push_back(i);
            both.push_back(i);
        }
        const auto joint_blocks = joint.select(both);
        const auto independent =
            FiniteDistribution::product(joint.select(left), joint.select(right));
        best = std::max(best, tv_distance(joint_blocks, independent));
    }
    return best;
}

std::vector<double> analytic_beta_ma(int t, std::size_t max_tau) {
    std::vector<double> beta(max_tau + 1);
    for (std::size_t tau = 0; tau <= max_tau; ++tau) {
        // eps_k reads W_{k-t..k} and eps_{k+tau+1} reads W_{k+tau+1-t..};
        // a gap of tau >= t leaves no shared W_j, so the blocks are
        // independent. Below that we make no claim and use the trivial bound.
        beta[tau] = (static_cast<int>(tau) >= t) ? 0.0 : 1.0;
    }
    return beta;
}

double cyclic_mixture_beta_bound(double b) {
    const double w = 1.0 - b / 4.0;
    return 1.0 - w * w;
}

std::string CoefficientTable::psi_csv() const {
    std::ostringstream out;
    out << "k,tau,psi\n";
    for (std::size_t tau = 0; tau < psi.size(); ++tau) {
        for (std::size_t k = 1; k <= psi[tau].size(); ++k) {
            out << k << "," << tau << "," << psi[tau][k - 1] << "\n";
        }
    }
    return out.str();
}

std::string CoefficientTable::beta_csv() const {
    std::ostringstream out;
    out << "tau,beta\n";
    for (std::size_t tau = 0; tau < beta.size(); ++tau) {
        out << tau << "," << beta[tau] << "\n";
    }
    return out.str();
}

nlohmann::json CoefficientTable::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["psi"] = psi;
    j["psi_bar"] = psi_bar;
    j["beta"] = beta;
    j["provenance"] = provenance;
    return j;
}

CoefficientTable compute_coefficients(const FiniteDistribution& joint) {
    CoefficientTable table;
    const std::size_t m = joint.length();
    table.n = m - 1;
    table.psi.resize(m);
    table.psi_bar.resize(m);
    table.beta.resize(m);
    for (std::size_t tau = 0; tau < m; ++tau) {
        table.psi[tau].resize(m);
        for (std::size_t k = 1; k <= m; ++k) {
            table.psi[tau][k - 1] = psi_k_tau(joint, k, tau);
        }
        table.psi_bar[tau] = psi_bar(table.psi[tau]);
        table.beta[tau] = beta_mixing(joint, tau);
    }
    return table;
}

}  // namespace tsconf
