#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsconf/processes.hpp"

#include "json.hpp"

namespace tsconf {

/**
 * Deletion operator Delta^j_{k,tau} on a length-m vector (1-based k).
 * Both variants drop tau entries; variant 0 keeps the last entry of w in
 * last position, variant 1 puts w_k in last position.
 */
struct DeletionSpec {
    std::size_t k = 1;     // in [1, m]
    std::size_t tau = 0;   // in [0, m-1]
    int variant = 0;       // 0 or 1
};

/// 0-based source positions selected by Delta^j_{k,tau} on a length-m vector.
std::vector<std::size_t> deletion_index_map(std::size_t m, const DeletionSpec& spec);

template <typename T>
std::vector<T> delete_block(std::span<const T> w, const DeletionSpec& spec) {
    const std::vector<std::size_t> idx = deletion_index_map(w.size(), spec);
    std::vector<T> out;
    out.reserve(idx.size());
    for (const std::size_t i : idx) {
        out.push_back(w[i]);
    }
    return out;
}

/**
 * Split-setting deletion operator Delta^{split,j}_{k,tau,tau*} on a series
 * of length n+1 = n0 + n1 + 1. Keeps the training block Z_1..Z_{n0} intact
 * and applies a switch-style deletion to the calibration-era tail.
 */
struct SplitDeletionSpec {
    std::size_t n0 = 1;
    std::size_t n1 = 1;
    std::size_t k = 1;         // in [1, n1+1-tau_star]
    std::size_t tau = 0;
    std::size_t tau_star = 0;
    int variant = 0;
};

/// 0-based source positions on a vector of length n0 + n1 + 1.
std::vector<std::size_t> split_deletion_index_map(const SplitDeletionSpec& spec);

template <typename T>
std::vector<T> delete_split(std::span<const T> w, const SplitDeletionSpec& spec) {
    const std::vector<std::size_t> idx = split_deletion_index_map(spec);
    if (w.size() != spec.n0 + spec.n1 + 1) {
        throw std::invalid_argument("series length must equal n0 + n1 + 1");
    }
    std::vector<T> out;
    out.reserve(idx.size());
    for (const std::size_t i : idx) {
        out.push_back(w[i]);
    }
    return out;
}

/// Total variation distance (1/2) * sum |p - q| between same-shape pmfs.
double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q);

/// Exact pushforward pmf under an arbitrary sequence-to-sequence map.
FiniteDistribution pushforward_distribution(
    const FiniteDistribution& joint,
    const std::function<void(std::span<const int>, std::vector<int>&)>& map,
    std::size_t out_alphabet, std::size_t out_length);

/**
 * A finite-valued score with memory L over chain states: code(state,
 * context states most recent first) indexes into values. Enables exact
 * pushforward of a Z-pmf to an S-pmf.
 */
struct FiniteScore {
    int memory = 0;
    std::size_t num_codes = 1;
    std::function<std::size_t(int, std::span<const int>)> code;
    std::vector<double> values;  // score value per code
};

/// State rank score: code = state, value = state.
FiniteScore finite_rank_score(std::size_t alphabet);
/// Memory-1 indicator score 1{z = z_{-1}} with codes {0, 1}.
FiniteScore finite_match_score();

/// Law of (S_{L+1}, ..., S_m) as codes, pushed forward from a Z-pmf.
FiniteDistribution score_pushforward(const FiniteDistribution& z_joint,
                                     const FiniteScore& score);

/// Switch coefficient Psi_{k,tau}: TV between the two deletion pushforwards.
double psi_k_tau(const FiniteDistribution& joint, std::size_t k, std::size_t tau);

/// Arithmetic mean of a complete k-column of Psi values.
double psi_bar(std::span<const double> psi_column);

/**
 * beta-mixing coefficient with lag tau: max over split points k of the TV
 * between the joint law of the two tau-separated blocks and the product of
 * their marginals. By convention beta(n) = 0 (no valid split point).
 */
double beta_mixing(const FiniteDistribution& joint, std::size_t tau);

/// Analytic beta table for the MA(t) process: 1 for tau < t, 0 from t on.
std::vector<double> analytic_beta_ma(int t, std::size_t max_tau);

/// Upper bound 1 - (1 - b/4)^2 on beta(tau) for the cyclic mixture, any tau.
double cyclic_mixture_beta_bound(double b);

/**
 * Full coefficient grid for a finite process: Psi_{k,tau} for all valid
 * (k, tau), the per-tau averages, and beta(tau).
 */
struct CoefficientTable {
    std::size_t n = 0;                         // series length is n+1
    std::vector<std::vector<double>> psi;      // psi[tau][k-1], k = 1..n+1
    std::vector<double> psi_bar;               // indexed by tau
    std::vector<double> beta;                  // indexed by tau, beta(n) = 0
    std::string provenance = "exact";          // exact | analytic

    [[nodiscard]] std::string psi_csv() const;   // columns: k,tau,psi
    [[nodiscard]] std::string beta_csv() const;  // columns: tau,beta
    [[nodiscard]] nlohmann::json to_json() const;
};

CoefficientTable compute_coefficients(const FiniteDistribution& joint);

}  // namespace tsconf
