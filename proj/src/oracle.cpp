#include "tsconf/oracle.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace tsconf::oracle {

namespace {

void enumerate_sequences(std::size_t alphabet, std::size_t m, Sequence& prefix,
                         const std::function<void(const Sequence&)>& visit) {
    if (prefix.size() == m) {
        visit(prefix);
        return;
    }
    for (std::size_t a = 0; a < alphabet; ++a) {
        prefix.push_back(static_cast<int>(a));
        enumerate_sequences(alphabet, m, prefix, visit);
        prefix.pop_back();
    }
}

}  // namespace

SeqLaw enumerate_markov(const FiniteMarkovSpec& spec, std::size_t m) {
    SeqLaw law;
    Sequence prefix;
    enumerate_sequences(spec.alphabet, m, prefix, [&](const Sequence& seq) {
        double mass = spec.initial[static_cast<std::size_t>(seq[0])];
        for (std::size_t i = 1; i < m; ++i) {
            mass *= spec.p(static_cast<std::size_t>(seq[i - 1]),
                           static_cast<std::size_t>(seq[i]));
        }
        if (mass > 0.0) law[seq] += mass;
    });
    return law;
}

SeqLaw enumerate_cyclic(const CyclicMixtureSpec& spec, std::size_t m) {
    SeqLaw law;
    const double iid_each =
        (1.0 - spec.b / 4.0) / std::pow(static_cast<double>(spec.K), static_cast<double>(m));
    Sequence prefix;
    enumerate_sequences(spec.K, m, prefix,
                        [&](const Sequence& seq) { law[seq] += iid_each; });
    for (std::size_t start = 0; start < spec.K; ++start) {
        Sequence seq(m);
        for (std::size_t i = 0; i < m; ++i) {
            seq[i] = static_cast<int>((start + i) % spec.K);
        }
        law[seq] += spec.b / 4.0 / static_cast<double>(spec.K);
    }
    return law;
}

double tv(const SeqLaw& p, const SeqLaw& q) {
    std::set<Sequence> support;
    for (const auto& [seq, mass] : p) support.insert(seq);
    for (const auto& [seq, mass] : q) support.insert(seq);
    double sum = 0.0;
    for (const auto& seq : support) {
        const auto pi = p.find(seq);
        const auto qi = q.find(seq);
        const double pv = pi == p.end() ? 0.0 : pi->second;
        const double qv = qi == q.end() ? 0.0 : qi->second;
        sum += std::abs(pv - qv);
    }
    return 0.5 * sum;
}

namespace {

// Subvector per the deletion definition, written out case by case.
Sequence subvector(const Sequence& w, std::size_t k, std::size_t tau, int variant) {
    const std::size_t m = w.size();
    Sequence out;
    if (k <= m - 1 - tau && k + tau + 1 <= m) {
        if (variant == 0) {
            for (std::size_t i = 1; i <= m - tau - k; ++i) out.push_back(w[i - 1]);
            for (std::size_t i = m - k + 1; i <= m; ++i) out.push_back(w[i - 1]);
        } else {
            for (std::size_t i = k + tau + 1; i <= m; ++i) out.push_back(w[i - 1]);
            for (std::size_t i = 1; i <= k; ++i) out.push_back(w[i - 1]);
        }
    } else {
        if (variant == 0) {
            for (std::size_t i = tau + 1; i <= m; ++i) out.push_back(w[i - 1]);
        } else {
            for (std::size_t i = k - m + tau + 1; i <= k; ++i) out.push_back(w[i - 1]);
        }
    }
    return out;
}

}  // namespace

double psi(const SeqLaw& law, std::size_t k, std::size_t tau) {
    SeqLaw law0;
    SeqLaw law1;
    for (const auto& [seq, mass] : law) {
        law0[subvector(seq, k, tau, 0)] += mass;
        law1[subvector(seq, k, tau, 1)] += mass;
    }
    return tv(law0, law1);
}

double beta(const SeqLaw& law, std::size_t tau) {
    if (law.empty()) {
        throw std::invalid_argument("empty law");
    }
    const std::size_t n = law.begin()->first.size() - 1;
    if (tau >= n) {
        return 0.0;
    }
    double best = 0.0;
    for (std::size_t k = 1; k <= n - tau; ++k) {
        SeqLaw joint_blocks;
        SeqLaw left;
        SeqLaw right;
        for (const auto& [seq, mass] : law) {
            Sequence a(seq.begin(), seq.begin() + static_cast<long>(k));
            Sequence b(seq.begin() + static_cast<long>(k + tau), seq.end());
            Sequence ab = a;
            ab.insert(ab.end(), b.begin(), b.end());
            joint_blocks[ab] += mass;
            left[a] += mass;
            right[b] += mass;
        }
        SeqLaw independent;
        for (const auto& [a, pa] : left) {
            for (const auto& [b, pb] : right) {
                Sequence ab = a;
                ab.insert(ab.end(), b.begin(), b.end());
                independent[ab] += pa * pb;
            }
        }
        best = std::max(best, tv(joint_blocks, independent));
    }
    return best;
}

double exact_coverage_rank_count(const SeqLaw& law, const FiniteScore& score,
                                 double alpha, bool jitter) {
    if (law.empty()) {
        throw std::invalid_argument("empty law");
    }
    const auto L = static_cast<std::size_t>(score.memory);
    const std::size_t len = law.begin()->first.size();
    if (len <= L + 1) {
        throw std::invalid_argument("series too short for score memory");
    }
    const std::size_t m_all = len - L;  // scores S_{L+1}, ..., S_{n+1}
    const auto rank =
        static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(m_all)));
    double coverage = 0.0;
    std::vector<int> context(L);
    std::vector<double> scores;
    for (const auto& [seq, mass] : law) {
        scores.clear();
        for (std::size_t i = L; i < len; ++i) {
            for (std::size_t j = 0; j < L; ++j) {
                context[j] = seq[i - 1 - j];
            }
            scores.push_back(score.values[score.code(seq[i], context)]);
        }
        const double test = scores.back();
        std::size_t below = 0;
        std::size_t tied = 0;  // among the other scores
        for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
            if (scores[i] < test) ++below;
            if (scores[i] == test) ++tied;
        }
        if (jitter) {
            // Average the coverage event over every position of the test
            // score within its tie group.
            double hits = 0.0;
            for (std::size_t b = 0; b <= tied; ++b) {
                if (below + b + 1 <= rank) hits += 1.0;
            }
            coverage += mass * hits / static_cast<double>(tied + 1);
        } else {
            if (below + 1 <= rank) coverage += mass;
        }
    }
    return coverage;
}

}  // namespace tsconf::oracle
