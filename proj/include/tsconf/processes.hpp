#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsconf/rng.hpp"

namespace tsconf {

struct DataPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// A series (Z_1, ..., Z_{n+1}); the last point is the test point.
struct TimeSeries {
    std::vector<DataPoint> points;

    [[nodiscard]] std::size_t n() const { return points.size() - 1; }
    /// 1-based access matching the series index convention.
    [[nodiscard]] const DataPoint& at(std::size_t i) const { return points[i - 1]; }
};

/**
 * Regression process Y_i = f(X_i) + eps_i where eps_i = sum_{j=i-t}^{i} W_j
 * is a moving average of order t with unit coefficients and iid standard
 * Gaussian W_j. Defaults: X_i iid Uniform(0,1), f(x) = sin(2*pi*x); both
 * are configurable and the coverage of the true-f residual score does not
 * depend on the choice.
 */
struct MAProcessSpec {
    int order = 0;  // t >= 0
    std::function<double(double)> f;
    std::function<double(RngStream&)> covariate_law;  // defaults to Uniform(0,1)
    std::size_t n = 0;

    static MAProcessSpec with_defaults(int t, std::size_t n);
};

/**
 * Mixture of a deterministic cyclic walk over K distinct points (weight b/4)
 * and iid uniform draws from the same points (weight 1 - b/4). Stationary by
 * construction; used as an adversarial lower-bound process.
 */
struct CyclicMixtureSpec {
    std::size_t K = 1;
    double b = 0.0;  // in [0, 1]
    std::size_t n = 0;
    std::vector<DataPoint> z_points;  // K distinct points; defaults to z_k = (k, k)

    static CyclicMixtureSpec with_defaults(std::size_t K, double b, std::size_t n);
    void validate() const;
};

/// Finite-alphabet Markov chain; states embed as data points via a -> (a, a).
struct FiniteMarkovSpec {
    std::size_t alphabet = 2;                   // A >= 2
    std::vector<double> transition;             // A x A, row-major, row-stochastic
    std::vector<double> initial;                // length A
    std::size_t n = 0;

    [[nodiscard]] double p(std::size_t from, std::size_t to) const {
        return transition[from * alphabet + to];
    }
    void validate() const;
};

/// Stationary distribution of a row-stochastic matrix (power iteration).
std::vector<double> stationary_distribution(std::size_t alphabet,
                                            std::span<const double> transition);

/**
 * Explicit joint pmf over sequences in {0,...,A-1}^m, stored densely with
 * the first symbol most significant. Capped at 10^7 cells.
 */
class FiniteDistribution {
public:
    static constexpr std::size_t kMaxCells = 10'000'000;

    FiniteDistribution(std::size_t alphabet, std::size_t length);

    [[nodiscard]] std::size_t alphabet() const { return alphabet_; }
    [[nodiscard]] std::size_t length() const { return length_; }
    [[nodiscard]] std::size_t cells() const { return pmf_.size(); }

    [[nodiscard]] double& mass(std::size_t index) { return pmf_[index]; }
    [[nodiscard]] double mass(std::size_t index) const { return pmf_[index]; }
    [[nodiscard]] std::span<const double> pmf() const { return pmf_; }

    [[nodiscard]] std::size_t encode(std::span<const int> sequence) const;
    void decode(std::size_t index, std::span<int> out) const;

    [[nodiscard]] double at(std::span<const int> sequence) const {
        return pmf_[encode(sequence)];
    }
    [[nodiscard]] double total_mass() const;

    /**
     * Law of the selected positions (0-based, in the given order; positions
     * may reorder entries). This is the pushforward under coordinate
     * selection, so deletion-operator laws are a special case.
     */
    [[nodiscard]] FiniteDistribution select(std::span<const std::size_t> positions) const;

    /// Independent product of two distributions over the same alphabet.
    static FiniteDistribution product(const FiniteDistribution& a,
                                      const FiniteDistribution& b);

    void validate() const;  // nonnegative, sums to 1 within 1e-12

private:
    std::size_t alphabet_;
    std::size_t length_;
    std::vector<double> pmf_;
};

TimeSeries sample_ma(const MAProcessSpec& spec, RngStream& rng);
TimeSeries sample_cyclic_mixture(const CyclicMixtureSpec& spec, RngStream& rng);
TimeSeries sample_markov(const FiniteMarkovSpec& spec, RngStream& rng);

/// Markov-chain sample as raw states, avoiding the data-point embedding.
void sample_markov_states(const FiniteMarkovSpec& spec, RngStream& rng,
                          std::vector<int>& out_states);

/// Exact joint pmf of (Z_1, ..., Z_m) by chain rule.
FiniteDistribution joint_pmf(const FiniteMarkovSpec& spec, std::size_t m);
/// Exact joint pmf of (Z_1, ..., Z_m): cyclic branch plus iid branch.
FiniteDistribution joint_pmf(const CyclicMixtureSpec& spec, std::size_t m);

}  // namespace tsconf
