#include "tsconf/processes.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace tsconf {

MAProcessSpec MAProcessSpec::with_defaults(int t, std::size_t n) {
    MAProcessSpec spec;
    spec.order = t;
    spec.f = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
    spec.covariate_law = [](RngStream& rng) { return rng.uniform(); };
    spec.n = n;
    return spec;
}

CyclicMixtureSpec CyclicMixtureSpec::with_defaults(std::size_t K, double b, std::size_t n) {
    CyclicMixtureSpec spec;
    spec.K = K;
    spec.b = b;
    spec.n = n;
    spec.z_points.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto v = static_cast<double>(k);
        spec.z_points.push_back({v, v});
    }
    return spec;
}

void CyclicMixtureSpec::validate() const {
    if (K < 1 || z_points.size() != K) {
        throw std::invalid_argument("cyclic mixture needs K >= 1 points");
    }
    if (b < 0.0 || b > 1.0) {
        throw std::invalid_argument("mixture parameter b must lie in [0, 1]");
    }
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = i + 1; j < K; ++j) {
            if (z_points[i] == z_points[j]) {
                throw std::invalid_argument("cyclic mixture points must be distinct");
            }
        }
    }
}

void FiniteMarkovSpec::validate() const {
    if (alphabet < 2) {
        throw std::invalid_argument("alphabet size must be >= 2");
    }
    if (transition.size() != alphabet * alphabet || initial.size() != alphabet) {
        throw std::invalid_argument("transition/initial shape mismatch");
    }
    for (std::size_t a = 0; a < alphabet; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < alphabet; ++b) {
            const double v = p(a, b);
            if (v < 0.0) throw std::invalid_argument("negative transition probability");
            row += v;
        }
        if (std::abs(row - 1.0) > 1e-12) {
            throw std::invalid_argument("transition rows must sum to 1");
        }
    }
    const double init_sum = std::accumulate(initial.begin(), initial.end(), 0.0);
    if (std::abs(init_sum - 1.0) > 1e-12) {
        throw std::invalid_argument("initial distribution must sum to 1");
    }
}

std::vector<double> stationary_distribution(std::size_t alphabet,
                                            std::span<const double> transition) {
    std::vector<double> pi(alphabet, 1.0 / static_cast<double>(alphabet));
    std::vector<double> next(alphabet, 0.0);
    for (int iter = 0; iter < 20000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t a = 0; a < alphabet; ++a) {
            for (std::size_t b = 0; b < alphabet; ++b) {
                next[b] += pi[a] * transition[a * alphabet + b];
            }
        }
        double diff = 0.0;
        for (std::size_t a = 0; a < alphabet; ++a) {
            diff += std::abs(next[a] - pi[a]);
        }
        pi.swap(next);
        if (diff < 1e-15) break;
    }
    return pi;
}

FiniteDistribution::FiniteDistribution(std::size_t alphabet, std::size_t length)
    : alphabet_(alphabet), length_(length) {
    if (alphabet == 0 || length == 0) {
        throw std::invalid_argument("alphabet and length must be positive");
    }
    std::size_t cells = 1;
    for (std::size_t i = 0; i < length; ++i) {
        if (cells > kMaxCells / alphabet) {
            throw std::invalid_argument("state space too large");
        }
        cells *= alphabet;
    }
    pmf_.assign(cells, 0.0);
}

std::size_t FiniteDistribution::encode(std::span<const int> sequence) const {
    std::size_t index = 0;
    for (const int symbol : sequence) {
        index = index * alphabet_ + static_cast<std::size_t>(symbol);
    }
    return index;
}

void FiniteDistribution::decode(std::size_t index, std::span<int> out) const {
    for (std::size_t pos = length_; pos-- > 0;) {
        out[pos] = static_cast<int>(index % alphabet_);
        index /= alphabet_;
    }
}

double FiniteDistribution::total_mass() const {
    return std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
}

FiniteDistribution FiniteDistribution::select(std::span<const std::size_t> positions) const {
    FiniteDistribution out(alphabet_, positions.size());
    std::vector<int> seq(length_);
    std::vector<int> sub(positions.size());
    for (std::size_t idx = 0; idx < pmf_.size(); ++idx) {
        const double mass = pmf_[idx];
        if (mass == 0.0) continue;
        decode(idx, seq);
        for (std::size_t j = 0; j < positions.size(); ++j) {
            sub[j] = seq[positions[j]];
        }
        out.mass(out.encode(sub)) += mass;
    }
    return out;
}

FiniteDistribution FiniteDistribution::product(const FiniteDistribution& a,
                                               const FiniteDistribution& b) {
    if (a.alphabet() != b.alphabet()) {
        throw std::invalid_argument("alphabet mismatch in product");
    }
    FiniteDistribution out(a.alphabet(), a.length() + b.length());
    for (std::size_t i = 0; i < a.cells(); ++i) {
        const double pa = a.mass(i);
        if (pa == 0.0) continue;
        for (std::size_t j = 0; j < b.cells(); ++j) {
            out.mass(i * b.cells() + j) = pa * b.mass(j);
        }
    }
    return out;
}

void FiniteDistribution::validate() const {
    for (const double v : pmf_) {
        if (v < 0.0) throw std::invalid_argument("negative probability");
    }
    if (std::abs(total_mass() - 1.0) > 1e-12) {
        throw std::invalid_argument("pmf must sum to 1");
    }
}

TimeSeries sample_ma(const MAProcessSpec& spec, RngStream& rng) {
    if (spec.order < 0 || !spec.f || !spec.covariate_law) {
        throw std::invalid_argument("invalid MA process spec");
    }
    const auto t = static_cast<std::size_t>(spec.order);
    const std::size_t len = spec.n + 1;
    // W_{1-t}, ..., W_{n+1}: the full finite window, no burn-in needed.
    std::vector<double> noise(len + t);
    for (double& w : noise) {
        w = rng.gaussian();
    }
    TimeSeries series;
    series.points.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        double eps = 0.0;
        for (std::size_t j = i; j <= i + t; ++j) {
            eps += noise[j];
        }
        const double x = spec.covariate_law(rng);
        series.points[i] = {x, spec.f(x) + eps};
    }
    return series;
}

TimeSeries sample_cyclic_mixture(const CyclicMixtureSpec& spec, RngStream& rng) {
    // Validation is O(K^2); callers validate the spec once, not per trial.
    const std::size_t len = spec.n + 1;
    TimeSeries series;
    series.points.resize(len);
    if (rng.uniform() < spec.b / 4.0) {
        std::size_t j = rng.uniform_int(spec.K);
        for (std::size_t i = 0; i < len; ++i) {
            series.points[i] = spec.z_points[j];
            j = (j + 1) % spec.K;
        }
    } else {
        for (std::size_t i = 0; i < len; ++i) {
            series.points[i] = spec.z_points[rng.uniform_int(spec.K)];
        }
    }
    return series;
}

void sample_markov_states(const FiniteMarkovSpec& spec, RngStream& rng,
                          std::vector<int>& out_states) {
    out_states.resize(spec.n + 1);
    auto draw = [&](std::span<const double> dist) {
        double u = rng.uniform();
        for (std::size_t a = 0; a + 1 < spec.alphabet; ++a) {
            if (u < dist[a]) return static_cast<int>(a);
            u -= dist[a];
        }
        return static_cast<int>(spec.alphabet - 1);
    };
    out_states[0] = draw(spec.initial);
    for (std::size_t i = 1; i <= spec.n; ++i) {
        const auto from = static_cast<std::size_t>(out_states[i - 1]);
        out_states[i] = draw(std::span<const double>(spec.transition)
                                 .subspan(from * spec.alphabet, spec.alphabet));
    }
}

TimeSeries sample_markov(const FiniteMarkovSpec& spec, RngStream& rng) {
    std::vector<int> states;
    sample_markov_states(spec, rng, states);
    TimeSeries series;
    series.points.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto v = static_cast<double>(states[i]);
        series.points[i] = {v, v};
    }
    return series;
}

FiniteDistribution joint_pmf(const FiniteMarkovSpec& spec, std::size_t m) {
    spec.validate();
    if (m == 0) {
        throw std::invalid_argument("sequence length must be positive");
    }
    FiniteDistribution dist(spec.alphabet, m);
    std::vector<int> seq(m);
    for (std::size_t idx = 0; idx < dist.cells(); ++idx) {
        dist.decode(idx, seq);
        double mass = spec.initial[static_cast<std::size_t>(seq[0])];
        for (std::size_t i = 1; i < m && mass > 0.0; ++i) {
            mass *= spec.p(static_cast<std::size_t>(seq[i - 1]),
                           static_cast<std::size_t>(seq[i]));
        }
        dist.mass(idx) = mass;
    }
    return dist;
}

FiniteDistribution joint_pmf(const CyclicMixtureSpec& spec, std::size_t m) {
    spec.validate();
    if (m == 0) {
        throw std::invalid_argument("sequence length must be positive");
    }
    FiniteDistribution dist(spec.K, m);
    const double iid_mass =
        (1.0 - spec.b / 4.0) / std::pow(static_cast<double>(spec.K), static_cast<double>(m));
    for (std::size_t idx = 0; idx < dist.cells(); ++idx) {
        dist.mass(idx) = iid_mass;
    }
    // Cyclic branch: one sequence per starting index, each with mass (b/4)/K.
    const double cyclic_mass = spec.b / 4.0 / static_cast<double>(spec.K);
    std::vector<int> seq(m);
    for (std::size_t start = 0; start < spec.K; ++start) {
        for (std::size_t i = 0; i < m; ++i) {
            seq[i] = static_cast<int>((start + i) % spec.K);
        }
        dist.mass(dist.encode(seq)) += cyclic_mass;
    }
    return dist;
}

}  // namespace tsconf
