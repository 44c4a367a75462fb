#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace tsconf {

/// One candidate of a min-over-lags bound evaluation.
struct BoundComponent {
    std::size_t tau = 0;
    long tau_star = -1;  // -1 when not applicable
    double gap_term = 0.0;
    double coeff_term = 0.0;
    double total = 0.0;
};

/**
 * Result of evaluating a coverage bound: the bound value, the minimizing
 * lag(s) (ties broken toward smaller tau, then smaller tau*), and the full
 * per-candidate breakdown. Vacuous (out-of-[0,1]) values are reported
 * verbatim and flagged.
 */
struct BoundResult {
    double bound_value = 0.0;
    std::size_t minimizing_tau = 0;
    long minimizing_tau_star = -1;
    bool vacuous = false;
    std::vector<BoundComponent> components;

    [[nodiscard]] nlohmann::json to_json() const;
};

/**
 * Pretrained lower bound: 1 - alpha - min_tau { tau/(n-L+1) + psi_bar_s[tau] }
 * over tau in {0, ..., n-L}. The table must cover exactly that range.
 */
BoundResult thm1_lower(double alpha, std::size_t n, int L,
                       std::span<const double> psi_bar_s);

/**
 * beta-mixing lower bound for a stationary series:
 * 1 - alpha - min_tau { (tau+L)/(n-L+1) + 2*beta[tau] } over tau in
 * {0, ..., n-2L}.
 */
BoundResult cor1_lower(double alpha, std::size_t n, int L, std::span<const double> beta);

/// Data-side form of the same bound, from a psi_bar table of the Z series.
BoundResult cor1_lower_psi(double alpha, std::size_t n, int L,
                           std::span<const double> psi_bar_z);

/**
 * Overcoverage bound (requires distinct scores):
 * ceil((1-alpha)(n-L+1))/(n-L+1) + min_tau { tau/(n-L+1) + psi_bar_s[tau] }.
 */
BoundResult thm3_upper(double alpha, std::size_t n, int L,
                       std::span<const double> psi_bar_s);

/**
 * Split lower bound: 1 - alpha - min over tau, tau* >= 0 with
 * tau + tau* <= n1 - L of
 * { (tau + alpha*tau*)/(n1 - tau* - L + 1) + psi_split[tau*][tau] }.
 * psi_split[tau*][tau] holds the averaged switch coefficient of the
 * tau*-trimmed score vector; each row must cover tau = 0..n1-L-tau*.
 */
BoundResult thm4_split_lower(double alpha, std::size_t n1, int L,
                             const std::vector<std::vector<double>>& psi_split);

/**
 * Split beta-mixing lower bound: 1 - alpha - min over tau, tau* >= 0 with
 * tau + tau* <= n1 - 2L of
 * { (tau + alpha*tau* + L)/(n1 - tau* - L + 1) + 2*beta[tau] + 2*beta[tau*] }.
 */
BoundResult cor2_split_lower(double alpha, std::size_t n1, int L,
                             std::span<const double> beta);

/**
 * Coverage ceiling of the cyclic-mixture construction:
 * (1 - b/4)(1 - alpha) + n(n+1)/(2K). Requires (1-alpha)(n+1) integer.
 */
double thm2_ceiling(double alpha, std::size_t n, double b, double K);

}  // namespace tsconf
