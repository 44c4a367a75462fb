#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <span>

#include "tsconf/processes.hpp"
#include "tsconf/rng.hpp"

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

}  // namespace

TEST_CASE("moving-average sampler shape and determinism") {
    const auto spec = MAProcessSpec::with_defaults(2, 10);
    RngStream a(42, 0);
    RngStream b(42, 0);
    const TimeSeries s1 = sample_ma(spec, a);
    const TimeSeries s2 = sample_ma(spec, b);
    REQUIRE(s1.points.size() == 11);
    CHECK(s1.n() == 10);
    for (std::size_t i = 0; i < s1.points.size(); ++i) {
        CHECK(s1.points[i].x == s2.points[i].x);
        CHECK(s1.points[i].y == s2.points[i].y);
        CHECK(s1.points[i].x >= 0.0);
        CHECK(s1.points[i].x < 1.0);
    }
    RngStream c(42, 1);
    const TimeSeries s3 = sample_ma(spec, c);
    CHECK(s3.points[0].y != s1.points[0].y);
}

TEST_CASE("two-state chain joint pmf") {
    const auto joint = joint_pmf(stay_chain(0.9, 1), 2);
    const int s00[] = {0, 0};
    const int s01[] = {0, 1};
    const int s10[] = {1, 0};
    const int s11[] = {1, 1};
    CHECK(joint.at(std::span<const int>(s00, 2)) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(joint.at(std::span<const int>(s01, 2)) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(joint.at(std::span<const int>(s10, 2)) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(joint.at(std::span<const int>(s11, 2)) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(joint.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cyclic mixture joint pmf") {
    const auto joint = joint_pmf(CyclicMixtureSpec::with_defaults(2, 1.0, 1), 2);
    const int s00[] = {0, 0};
    const int s01[] = {0, 1};
    const int s10[] = {1, 0};
    const int s11[] = {1, 1};
    CHECK(joint.at(std::span<const int>(s00, 2)) ==
          doctest::Approx(0.1875).epsilon(1e-12));
    CHECK(joint.at(std::span<const int>(s01, 2)) ==
          doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(joint.at(std::span<const int>(s10, 2)) ==
          doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(joint.at(std::span<const int>(s11, 2)) ==
          doctest::Approx(0.1875).epsilon(1e-12));
}

TEST_CASE("fair coin joint pmf is uniform") {
    const auto joint = joint_pmf(stay_chain(0.5, 1), 2);
    for (std::size_t cell = 0; cell < 4; ++cell) {
        CHECK(joint.mass(cell) == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("stationary distribution of a symmetric chain") {
    const auto spec = stay_chain(0.9, 1);
    const auto pi = stationary_distribution(2, spec.transition);
    CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("encode/decode roundtrip and reordering select") {
    FiniteDistribution d(3, 3);
    std::vector<int> seq = {2, 0, 1};
    std::vector<int> back(3);
    d.decode(d.encode(seq), back);
    CHECK(back == seq);

    // Put all mass on (2, 0, 1); select positions (2, 0) -> point mass (1, 2).
    d.mass(d.encode(seq)) = 1.0;
    const std::vector<std::size_t> positions = {2, 0};
    const auto marg = d.select(positions);
    std::vector<int> want = {1, 2};
    CHECK(marg.at(want) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state-space cap is enforced") {
    CHECK_THROWS_WITH_AS(FiniteDistribution(10, 8), "state space too large",
                         std::invalid_argument);
}

TEST_CASE("invalid markov spec is rejected") {
    FiniteMarkovSpec spec;
    spec.alphabet = 2;
    spec.n = 2;
    spec.transition = {0.9, 0.2, 0.1, 0.9};  // first row sums to 1.1
    spec.initial = {0.5, 0.5};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("invalid cyclic spec is rejected") {
    auto spec = CyclicMixtureSpec::with_defaults(2, 1.5, 3);
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    auto dup = CyclicMixtureSpec::with_defaults(2, 0.5, 3);
    dup.z_points[1] = dup.z_points[0];
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}

TEST_CASE("markov sampler matches the chain transitions roughly") {
    const auto spec = stay_chain(0.9, 1);
    RngStream rng(7, 0);
    std::vector<int> states;
    std::size_t stays = 0;
    const std::size_t reps = 100000;
    for (std::size_t i = 0; i < reps; ++i) {
        sample_markov_states(spec, rng, states);
        if (states[0] == states[1]) ++stays;
    }
    CHECK(std::abs(static_cast<double>(stays) / reps - 0.9) < 0.01);
}
