#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <vector>

#include "tsconf/dependence.hpp"
#include "tsconf/oracle.hpp"
#include "tsconf/processes.hpp"

using namespace tsconf;

namespace {

FiniteMarkovSpec stay_chain(double stay, std::size_t n) {
    FiniteMarkovSpec spec;
    spec.alphabet = 2;
    spec.n = n;
    spec.transition = {stay, 1.0 - stay, 1.0 - stay, stay};
    spec.initial = {0.5, 0.5};
    return spec;
}

std::vector<std::size_t> indices(std::size_t m, std::size_t k, std::size_t tau,
                                 int variant) {
    return deletion_index_map(m, DeletionSpec{k, tau, variant});
}

FiniteDistribution bernoulli(double p1) {
    FiniteDistribution d(2, 1);
    d.mass(0) = 1.0 - p1;
    d.mass(1) = p1;
    return d;
}

}  // namespace

TEST_CASE("deletion operators on a length-10 vector") {
    // k strictly inside the deleted window vs. window clipped at the end.
    CHECK(indices(10, 3, 5, 0) == std::vector<std::size_t>({0, 1, 7, 8, 9}));
    CHECK(indices(10, 3, 5, 1) == std::vector<std::size_t>({8, 9, 0, 1, 2}));
    CHECK(indices(10, 8, 5, 0) == std::vector<std::size_t>({5, 6, 7, 8, 9}));
    CHECK(indices(10, 8, 5, 1) == std::vector<std::size_t>({3, 4, 5, 6, 7}));
}

TEST_CASE("deletion with no gap") {
    // Variant 0 is the identity; variant 1 rotates w_k into last position.
    std::vector<std::size_t> id(5);
    std::iota(id.begin(), id.end(), 0);
    CHECK(indices(5, 2, 0, 0) == id);
    CHECK(indices(5, 2, 0, 1) == std::vector<std::size_t>({2, 3, 4, 0, 1}));
    CHECK(indices(5, 5, 0, 1) == id);  // rotating the last entry is a no-op
}

TEST_CASE("delete_block applies the index map to values") {
    const std::vector<double> w = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    const auto out = delete_block<double>(w, DeletionSpec{3, 5, 1});
    CHECK(out == std::vector<double>({90, 100, 10, 20, 30}));
}

TEST_CASE("split deletions keep the training block fixed") {
    SplitDeletionSpec spec;
    spec.n0 = 3;
    spec.n1 = 3;
    spec.tau = 1;
    spec.tau_star = 1;

    spec.k = 1;
    spec.variant = 0;
    CHECK(split_deletion_index_map(spec) == std::vector<std::size_t>({0, 1, 2, 4, 6}));
    spec.variant = 1;
    CHECK(split_deletion_index_map(spec) == std::vector<std::size_t>({0, 1, 2, 6, 4}));

    spec.k = 2;
    spec.variant = 0;
    CHECK(split_deletion_index_map(spec) == std::vector<std::size_t>({0, 1, 2, 5, 6}));
    spec.variant = 1;
    CHECK(split_deletion_index_map(spec) == std::vector<std::size_t>({0, 1, 2, 4, 5}));
}

TEST_CASE("total variation on simple coins") {
    const auto p = bernoulli(0.4);
    const auto q = bernoulli(0.5);
    CHECK(tv_distance(p, q) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(tv_distance(p, p) == doctest::Approx(0.0));
    CHECK(tv_distance(p, q) == doctest::Approx(tv_distance(q, p)));
}

TEST_CASE("pushforward of a uniform pair under the sum map") {
    FiniteDistribution joint(2, 2);
    for (std::size_t cell = 0; cell < 4; ++cell) joint.mass(cell) = 0.25;
    const auto summed = pushforward_distribution(
        joint,
        [](std::span<const int> in, std::vector<int>& out) {
            out.assign(1, in[0] + in[1]);
        },
        3, 1);
    CHECK(summed.mass(0) == doctest::Approx(0.25));
    CHECK(summed.mass(1) == doctest::Approx(0.5));
    CHECK(summed.mass(2) == doctest::Approx(0.25));
}

TEST_CASE("finite scores") {
    const auto rank = finite_rank_score(3);
    CHECK(rank.memory == 0);
    CHECK(rank.num_codes == 3);
    CHECK(rank.code(2, {}) == 2);
    CHECK(rank.values[2] == doctest::Approx(2.0));

    const auto match = finite_match_score();
    CHECK(match.memory == 1);
    CHECK(match.num_codes == 2);
    const int prev_same[] = {1};
    const int prev_diff[] = {0};
    CHECK(match.code(1, prev_same) == 1);
    CHECK(match.code(1, prev_diff) == 0);
    CHECK(match.values[1] == doctest::Approx(1.0));
}

TEST_CASE("match-score law of a sticky chain") {
    // Z_1..Z_3 from the symmetric stay-0.9 chain; S_i = 1{Z_i = Z_{i-1}}.
    const auto joint = joint_pmf(stay_chain(0.9, 2), 3);
    const auto law = score_pushforward(joint, finite_match_score());
    REQUIRE(law.length() == 2);
    const int s11[] = {1, 1};
    const int s10[] = {1, 0};
    const int s01[] = {0, 1};
    const int s00[] = {0, 0};
    CHECK(law.at(std::span<const int>(s11, 2)) == doctest::Approx(0.81).epsilon(1e-12));
    CHECK(law.at(std::span<const int>(s10, 2)) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(law.at(std::span<const int>(s01, 2)) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(law.at(std::span<const int>(s00, 2)) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("switch coefficients vanish for iid sequences") {
    const auto joint = joint_pmf(stay_chain(0.5, 3), 4);
    for (std::size_t tau = 0; tau < 4; ++tau) {
        for (std::size_t k = 1; k + tau <= 4; ++k) {
            CHECK(psi_k_tau(joint, k, tau) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("switch coefficients agree with the brute-force definition") {
    const auto spec = stay_chain(0.8, 3);
    const auto joint = joint_pmf(spec, 4);
    const auto law = oracle::enumerate_markov(spec, 4);
    for (std::size_t tau = 0; tau <= 3; ++tau) {
        for (std::size_t k = 1; k <= 4 - tau; ++k) {
            CHECK(psi_k_tau(joint, k, tau) ==
                  doctest::Approx(oracle::psi(law, k, tau)).epsilon(1e-12));
        }
    }
}

TEST_CASE("beta-mixing on coins and chains") {
    const auto iid = joint_pmf(stay_chain(0.5, 3), 4);
    for (std::size_t tau = 0; tau <= 3; ++tau) {
        CHECK(beta_mixing(iid, tau) == doctest::Approx(0.0).epsilon(1e-12));
    }
    const auto sticky = joint_pmf(stay_chain(0.9, 3), 4);
    CHECK(beta_mixing(sticky, 0) > 0.1);
    CHECK(beta_mixing(sticky, 0) >= beta_mixing(sticky, 1));
    // No valid split point at the maximal lag.
    CHECK(beta_mixing(sticky, 3) == 0.0);
    const auto law = oracle::enumerate_markov(stay_chain(0.9, 3), 4);
    for (std::size_t tau = 0; tau <= 3; ++tau) {
        CHECK(beta_mixing(sticky, tau) ==
              doctest::Approx(oracle::beta(law, tau)).epsilon(1e-12));
    }
}

TEST_CASE("switch coefficients are controlled by mixing") {
    const auto joint = joint_pmf(stay_chain(0.85, 4), 5);
    for (std::size_t tau = 0; tau <= 4; ++tau) {
        const double two_beta = 2.0 * beta_mixing(joint, tau);
        for (std::size_t k = 1; k + tau <= 4; ++k) {
            CHECK(psi_k_tau(joint, k, tau) <= two_beta + 1e-12);
        }
        // Beyond the split range both deletions are pure shifts of a
        // stationary law, so the coefficient vanishes.
        for (std::size_t k = 5 - tau; k <= 5; ++k) {
            CHECK(psi_k_tau(joint, k, tau) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("analytic moving-average beta table") {
    const auto iid = analytic_beta_ma(0, 5);
    for (const double b : iid) CHECK(b == 0.0);
    const auto t2 = analytic_beta_ma(2, 5);
    CHECK(t2 == std::vector<double>({1.0, 1.0, 0.0, 0.0, 0.0, 0.0}));
}

TEST_CASE("cyclic mixture beta bound") {
    CHECK(cyclic_mixture_beta_bound(1.0) == doctest::Approx(0.4375).epsilon(1e-12));
    CHECK(cyclic_mixture_beta_bound(0.0) == doctest::Approx(0.0));
}

TEST_CASE("coefficient table internal consistency") {
    const auto joint = joint_pmf(stay_chain(0.9, 3), 4);
    const auto table = compute_coefficients(joint);
    CHECK(table.n == 3);
    REQUIRE(table.psi.size() == 4);
    REQUIRE(table.psi_bar.size() == 4);
    REQUIRE(table.beta.size() == 4);
    for (std::size_t tau = 0; tau <= 3; ++tau) {
        REQUIRE(table.psi[tau].size() == 4);
        CHECK(table.psi_bar[tau] ==
              doctest::Approx(psi_bar(table.psi[tau])).epsilon(1e-12));
        CHECK(table.beta[tau] == doctest::Approx(beta_mixing(joint, tau)).epsilon(1e-12));
        for (std::size_t k = 1; k <= 4; ++k) {
            CHECK(table.psi[tau][k - 1] ==
                  doctest::Approx(psi_k_tau(joint, k, tau)).epsilon(1e-12));
        }
    }
    CHECK(table.psi_csv().rfind("k,tau,psi", 0) == 0);
    CHECK(table.beta_csv().rfind("tau,beta", 0) == 0);
}

TEST_CASE("psi_bar is a plain mean") {
    const std::vector<double> column = {0.1, 0.3, 0.2};
    CHECK(psi_bar(column) == doctest::Approx(0.2).epsilon(1e-12));
}
