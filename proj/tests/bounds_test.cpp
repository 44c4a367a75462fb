#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "tsconf/bounds.hpp"
#include "tsconf/dependence.hpp"

using namespace tsconf;

TEST_CASE("pretrained lower bound picks the best lag") {
    // n = 9, L = 0: candidates tau/10 + psi_bar. tau = 1 and tau = 2 tie at
    // 0.2; the tie breaks toward the smaller lag.
    std::vector<double> psi_bar(10, 0.0);
    psi_bar[0] = 0.3;
    psi_bar[1] = 0.1;
    const auto r = thm1_lower(0.1, 9, 0, psi_bar);
    CHECK(r.bound_value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.minimizing_tau == 1);
    CHECK(r.minimizing_tau_star == -1);
    CHECK_FALSE(r.vacuous);
    REQUIRE(r.components.size() == 10);
    CHECK(r.components[1].gap_term == doctest::Approx(0.1));
    CHECK(r.components[1].coeff_term == doctest::Approx(0.1));
    CHECK(r.components[1].total == doctest::Approx(0.2));
}

TEST_CASE("lower bound rejects a wrong-sized table") {
    std::vector<double> short_table(9, 0.0);
    CHECK_THROWS_AS((void)thm1_lower(0.1, 9, 0, short_table), std::invalid_argument);
}

TEST_CASE("overcoverage bound in the exchangeable case") {
    const std::vector<double> zero10(10, 0.0);
    const auto a = thm3_upper(0.1, 9, 0, zero10);
    CHECK(a.bound_value == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(a.minimizing_tau == 0);

    const std::vector<double> zero11(11, 0.0);
    const auto b = thm3_upper(0.1, 10, 0, zero11);
    CHECK(b.bound_value == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("mixing lower bound on the analytic moving-average table") {
    // n = 50, order t = 2: the first zero of beta is at tau = 2.
    const auto beta = analytic_beta_ma(2, 50);
    const auto r = cor1_lower(0.1, 50, 0, beta);
    CHECK(r.bound_value == doctest::Approx(0.9 - 2.0 / 51.0).epsilon(1e-12));
    CHECK(r.minimizing_tau == 2);
    // iid case: the bound is exactly 1 - alpha.
    const auto iid = cor1_lower(0.1, 50, 0, analytic_beta_ma(0, 50));
    CHECK(iid.bound_value == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(iid.minimizing_tau == 0);
}

TEST_CASE("mixing lower bound goes vacuous under no mixing") {
    const std::vector<double> ones(6, 1.0);
    const auto r = cor1_lower(0.1, 5, 0, ones);
    CHECK(r.bound_value < 0.0);
    CHECK(r.vacuous);
}

TEST_CASE("memory shifts the mixing bound's lag range") {
    // L = 1, n = 10: tau ranges over 0..n-2L = 0..8 and the gap term is
    // (tau + 1)/10.
    const std::vector<double> beta(11, 0.0);
    const auto r = cor1_lower(0.1, 10, 1, beta);
    CHECK(r.bound_value == doctest::Approx(0.9 - 1.0 / 10.0).epsilon(1e-12));
    CHECK(r.components.size() == 9);
}

TEST_CASE("split bound minimizer over both lags") {
    // alpha = 0.5, n1 = 4, L = 0. Rows are indexed by tau*; the tau* = 2 row
    // is free of dependence cost and wins despite its gap penalty.
    std::vector<std::vector<double>> psi_split = {
        {0.5, 0.5, 0.5, 0.5, 0.5},
        {0.4, 0.4, 0.4, 0.4},
        {0.0, 0.0, 0.0},
        {0.5, 0.5},
        {0.5},
    };
    const auto r = thm4_split_lower(0.5, 4, 0, psi_split);
    CHECK(r.bound_value == doctest::Approx(0.5 - 1.0 / 3.0).epsilon(1e-12));
    CHECK(r.minimizing_tau == 0);
    CHECK(r.minimizing_tau_star == 2);
}

TEST_CASE("split mixing bound reduces to 1 - alpha for iid data") {
    const std::vector<double> beta(11, 0.0);
    const auto r = cor2_split_lower(0.1, 10, 0, beta);
    CHECK(r.bound_value == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.minimizing_tau == 0);
    CHECK(r.minimizing_tau_star == 0);
}

TEST_CASE("split mixing bound with memory only") {
    // beta = 0 but L = 1: best candidate is tau = tau* = 0 with gap L/10.
    const std::vector<double> beta(11, 0.0);
    const auto r = cor2_split_lower(0.1, 10, 1, beta);
    CHECK(r.bound_value == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.minimizing_tau == 0);
    CHECK(r.minimizing_tau_star == 0);
}

TEST_CASE("split mixing bound spends lags on both sides for dependent data") {
    // Moving average of order 1: beta(0) = 1, beta(tau >= 1) = 0. Both lags
    // must reach 1 before the dependence cost disappears.
    const auto beta = analytic_beta_ma(1, 20);
    const auto r = cor2_split_lower(0.1, 20, 0, beta);
    CHECK(r.minimizing_tau == 1);
    CHECK(r.minimizing_tau_star == 1);
    CHECK(r.bound_value == doctest::Approx(0.9 - 1.1 / 20.0).epsilon(1e-12));
}

TEST_CASE("adversarial coverage ceiling") {
    CHECK(thm2_ceiling(0.1, 9, 1.0, 10000.0) == doctest::Approx(0.6795).epsilon(1e-12));
    CHECK(thm2_ceiling(0.1, 9, 0.0, 1e12) == doctest::Approx(0.9).epsilon(1e-9));
    CHECK_THROWS_AS((void)thm2_ceiling(0.1, 10, 1.0, 10000.0), std::invalid_argument);
}

TEST_CASE("bound results serialize") {
    const std::vector<double> psi_bar(10, 0.0);
    const auto j = thm1_lower(0.1, 9, 0, psi_bar).to_json();
    CHECK(j["bound_value"].get<double>() == doctest::Approx(0.9));
    CHECK(j["minimizing_tau"].get<std::size_t>() == 0);
    CHECK(j["vacuous"].get<bool>() == false);
    CHECK(j["components"].is_array());
}
