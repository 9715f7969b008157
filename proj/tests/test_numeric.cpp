#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dropgp/numeric.hpp"

using namespace dropgp;

TEST_CASE("logsumexp of two logs equals log of the sum") {
    const double a = 0.8, b = 2.5;
    CHECK(logsumexp({std::log(a), std::log(b)}) ==
          doctest::Approx(std::log(a + b)).epsilon(1e-14));
}

TEST_CASE("logsumexp shift invariance") {
    const std::vector<double> v = {-1.3, 0.2, 2.4, -0.9};
    const double base = logsumexp(v);
    std::vector<double> shifted = v;
    for (double& x : shifted) x += 123.0;
    CHECK(logsumexp(shifted) == doctest::Approx(base + 123.0).epsilon(1e-13));
}

TEST_CASE("logsumexp survives large magnitudes") {
    CHECK(logsumexp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(logsumexp({-1000.0, -1000.0}) == doctest::Approx(-1000.0 + std::log(2.0)));
    CHECK(logsumexp({-1e9, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("logsumexp rejects empty input") {
    CHECK_THROWS_AS(logsumexp(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("bernoulli vector endpoints and range checks") {
    RngState rng(9);
    for (double v : sample_bernoulli_vector(0.0, 50, rng)) CHECK(v == 0.0);
    for (double v : sample_bernoulli_vector(1.0, 50, rng)) CHECK(v == 1.0);
    for (double v : sample_bernoulli_vector(0.5, 50, rng)) CHECK((v == 0.0 || v == 1.0));
    CHECK_THROWS_AS(sample_bernoulli_vector(-0.1, 3, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_bernoulli_vector(1.1, 3, rng), std::invalid_argument);
}
