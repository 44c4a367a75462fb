#include "tsconf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsconf {

namespace {

BoundResult minimize(std::vector<BoundComponent> components, double base, bool upper) {
    if (components.empty()) {
        throw std::invalid_argument("empty candidate grid");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < components.size(); ++i) {
        if (components[i].total < components[best].total) {
            best = i;  // strict comparison: ties resolve to the earlier candidate
        }
    }
    BoundResult result;
    result.components = std::move(components);
    result.minimizing_tau = result.components[best].tau;
    result.minimizing_tau_star = result.components[best].tau_star;
    result.bound_value =
        upper ? base + result.components[best].total : base - result.components[best].total;
    result.vacuous = result.bound_value < 0.0 || result.bound_value > 1.0;
    return result;
}

void check_memory(std::size_t n, int L) {
    if (L < 0 || static_cast<std::size_t>(L) > n) {
        throw std::invalid_argument("memory L out of range");
    }
}

}  // namespace

nlohmann::json BoundResult::to_json() const {
    nlohmann::json j;
    j["bound_value"] = bound_value;
    j["minimizing_tau"] = minimizing_tau;
    j["minimizing_tau_star"] = minimizing_tau_star;
    j["vacuous"] = vacuous;
    auto& list = j["components"] = nlohmann::json::array();
    for (const auto& c : components) {
        list.push_back({{"tau", c.tau},
                        {"tau_star", c.tau_star},
                        {"gap_term", c.gap_term},
                        {"coeff_term", c.coeff_term},
                        {"total", c.total}});
    }
    return j;
}

namespace {

std::vector<BoundComponent> pretrained_candidates(std::size_t n, int L,
                                                  std::span<const double> psi_bar_s) {
    check_memory(n, L);
    const std::size_t max_tau = n - static_cast<std::size_t>(L);
    if (psi_bar_s.size() < max_tau + 1) {
        throw std::invalid_argument("coefficient table does not cover tau range");
    }
    const double denom = static_cast<double>(n) - L + 1.0;
    std::vector<BoundComponent> components;
    components.reserve(max_tau + 1);
    for (std::size_t tau = 0; tau <= max_tau; ++tau) {
        BoundComponent c;
        c.tau = tau;
        c.gap_term = static_cast<double>(tau) / denom;
        c.coeff_term = psi_bar_s[tau];
        c.total = c.gap_term + c.coeff_term;
        components.push_back(c);
    }
    return components;
}

}  // namespace

BoundResult thm1_lower(double alpha, std::size_t n, int L,
                       std::span<const double> psi_bar_s) {
    return minimize(pretrained_candidates(n, L, psi_bar_s), 1.0 - alpha, false);
}

BoundResult thm3_upper(double alpha, std::size_t n, int L,
                       std::span<const double> psi_bar_s) {
    const double denom = static_cast<double>(n) - L + 1.0;
    const double base = std::ceil((1.0 - alpha) * denom) / denom;
    return minimize(pretrained_candidates(n, L, psi_bar_s), base, true);
}

BoundResult cor1_lower(double alpha, std::size_t n, int L, std::span<const double> beta) {
    check_memory(n, L);
    if (static_cast<std::size_t>(2 * L) > n) {
        throw std::invalid_argument("memory L out of range");
    }
    const std::size_t max_tau = n - static_cast<std::size_t>(2 * L);
    if (beta.size() < max_tau + 1) {
        throw std::invalid_argument("beta table does not cover tau range");
    }
    const double denom = static_cast<double>(n) - L + 1.0;
    std::vector<BoundComponent> components;
    components.reserve(max_tau + 1);
    for (std::size_t tau = 0; tau <= max_tau; ++tau) {
        BoundComponent c;
        c.tau = tau;
        c.gap_term = (static_cast<double>(tau) + L) / denom;
        c.coeff_term = 2.0 * beta[tau];
        c.total = c.gap_term + c.coeff_term;
        components.push_back(c);
    }
    return minimize(std::move(components), 1.0 - alpha, false);
}

BoundResult cor1_lower_psi(double alpha, std::size_t n, int L,
                           std::span<const double> psi_bar_z) {
    check_memory(n, L);
    if (static_cast<std::size_t>(2 * L) > n) {
        throw std::invalid_argument("memory L out of range");
    }
    const std::size_t max_tau = n - static_cast<std::size_t>(2 * L);
    if (psi_bar_z.size() < max_tau + 1) {
        throw std::invalid_argument("coefficient table does not cover tau range");
    }
    const double denom = static_cast<double>(n) - L + 1.0;
    const double scale = (static_cast<double>(n) + 1.0) / denom;
    std::vector<BoundComponent> components;
    components.reserve(max_tau + 1);
    for (std::size_t tau = 0; tau <= max_tau; ++tau) {
        BoundComponent c;
        c.tau = tau;
        c.gap_term = (static_cast<double>(tau) + L) / denom;
        c.coeff_term = scale * psi_bar_z[tau];
        c.total = c.gap_term + c.coeff_term;
        components.push_back(c);
    }
    return minimize(std::move(components), 1.0 - alpha, false);
}

BoundResult thm4_split_lower(double alpha, std::size_t n1, int L,
                             const std::vector<std::vector<double>>& psi_split) {
    check_memory(n1, L);
    const std::size_t budget = n1 - static_cast<std::size_t>(L);
    std::vector<BoundComponent> components;
    for (std::size_t tau_star = 0; tau_star <= budget; ++tau_star) {
        if (tau_star >= psi_split.size()) {
            throw std::invalid_argument("psi table does not cover tau_star range");
        }
        const std::size_t max_tau = budget - tau_star;
        if (psi_split[tau_star].size() < max_tau + 1) {
            throw std::invalid_argument("psi table row does not cover tau range");
        }
        const double denom = static_cast<double>(n1) - tau_star - L + 1.0;
        for (std::size_t tau = 0; tau <= max_tau; ++tau) {
            BoundComponent c;
            c.tau = tau;
            c.tau_star = static_cast<long>(tau_star);
            c.gap_term = (static_cast<double>(tau) + alpha * tau_star) / denom;
            c.coeff_term = psi_split[tau_star][tau];
            c.total = c.gap_term + c.coeff_term;
            components.push_back(c);
        }
    }
    // Candidates are generated tau_star-major; re-rank with the documented
    // tie-break (smallest tau first, then smallest tau_star).
    std::stable_sort(components.begin(), components.end(),
                     [](const BoundComponent& a, const BoundComponent& b) {
                         if (a.tau != b.tau) return a.tau < b.tau;
                         return a.tau_star < b.tau_star;
                     });
    return minimize(std::move(components), 1.0 - alpha, false);
}

BoundResult cor2_split_lower(double alpha, std::size_t n1, int L,
                             std::span<const double> beta) {
    check_memory(n1, L);
    if (static_cast<std::size_t>(2 * L) > n1) {
        throw std::invalid_argument("memory L out of range");
    }
    const std::size_t budget = n1 - static_cast<std::size_t>(2 * L);
    if (beta.size() < budget + 1) {
        throw std::invalid_argument("beta table does not cover tau range");
    }
    std::vector<BoundComponent> components;
    for (std::size_t tau = 0; tau <= budget; ++tau) {
        for (std::size_t tau_star = 0; tau_star + tau <= budget; ++tau_star) {
            const double denom = static_cast<double>(n1) - tau_star - L + 1.0;
            BoundComponent c;
            c.tau = tau;
            c.tau_star = static_cast<long>(tau_star);
            c.gap_term = (static_cast<double>(tau) + alpha * tau_star + L) / denom;
            c.coeff_term = 2.0 * beta[tau] + 2.0 * beta[tau_star];
            c.total = c.gap_term + c.coeff_term;
            components.push_back(c);
        }
    }
    return minimize(std::move(components), 1.0 - alpha, false);
}

double thm2_ceiling(double alpha, std::size_t n, double b, double K) {
    const double target = (1.0 - alpha) * (static_cast<double>(n) + 1.0);
    if (std::abs(target - std::round(target)) > 1e-9) {
        throw std::invalid_argument("(1-alpha)(n+1) must be an integer");
    }
    if (b < 0.0 || b > 1.0 || K < 1.0) {
        throw std::invalid_argument("require b in [0,1] and K >= 1");
    }
    const auto nd = static_cast<double>(n);
    return (1.0 - b / 4.0) * (1.0 - alpha) + nd * (nd + 1.0) / (2.0 * K);
}

}  // namespace tsconf
