#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <vector>

#include "tsconf/quantile.hpp"

using tsconf::conformal_level;
using tsconf::quantile;
using tsconf::quantile_rank;

TEST_CASE("order statistic ranks") {
    const std::vector<double> v = {3.0, 1.0, 2.0};
    CHECK(quantile(v, 1.0 / 3.0) == 1.0);
    CHECK(quantile(v, 0.5) == 2.0);
    CHECK(quantile(v, 2.0 / 3.0) == 2.0);
    CHECK(quantile(v, 1.0) == 3.0);
}

TEST_CASE("ties are kept as-is") {
    const std::vector<double> v = {1.0, 1.0, 2.0};
    CHECK(quantile(v, 1.0 / 3.0) == 1.0);
    CHECK(quantile(v, 2.0 / 3.0) == 1.0);
    CHECK(quantile(v, 1.0) == 2.0);
}

TEST_CASE("out-of-range levels degrade to infinities") {
    const std::vector<double> v = {1.0, 2.0};
    CHECK(quantile(v, 1.0001) == std::numeric_limits<double>::infinity());
    CHECK(quantile(v, 0.0) == -std::numeric_limits<double>::infinity());
    CHECK(quantile(v, -0.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("empty list is an error") {
    const std::vector<double> v;
    CHECK_THROWS_AS((void)quantile(v, 0.5), std::invalid_argument);
}

TEST_CASE("rank helper clamps to the valid range") {
    CHECK(quantile_rank(10, 0.91) == 10);
    CHECK(quantile_rank(10, 0.05) == 1);
    CHECK(quantile_rank(5, 1.0) == 5);
}

TEST_CASE("calibration level") {
    CHECK(conformal_level(0.1, 9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(conformal_level(0.1, 19) == doctest::Approx(18.0 / 19.0).epsilon(1e-12));
    CHECK(conformal_level(0.5, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)conformal_level(0.1, 0), std::invalid_argument);
}
