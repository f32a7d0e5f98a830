#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mfvi/special.hpp"
#include "oracles.hpp"

using namespace mfvi;

TEST_CASE("log_sum_exp basics") {
    CHECK(log_sum_exp(std::vector<double>{0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(log_sum_exp(std::vector<double>{-1000.0, -1000.0}) ==
          doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
    // direct high-precision evaluation of log(e^1 + e^2 + e^3)
    const double direct = 3.0 + std::log(1.0 + std::exp(-1.0) + std::exp(-2.0));
    CHECK(log_sum_exp(std::vector<double>{1.0, 2.0, 3.0}) == doctest::Approx(direct).epsilon(1e-15));
    CHECK(log_sum_exp(std::vector<double>{4.2}) == 4.2);  // exact for one element
    CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("log_sum_exp shift and permutation invariance") {
    std::mt19937_64 engine(7);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> v(5);
        for (double& x : v) {
            x = gauss(engine);
        }
        const double base = log_sum_exp(v);
        std::vector<double> shifted = v;
        const double c = gauss(engine);
        for (double& x : shifted) {
            x += c;
        }
        CHECK(log_sum_exp(shifted) == doctest::Approx(base + c).epsilon(1e-13));
        std::shuffle(v.begin(), v.end(), engine);
        CHECK(log_sum_exp(v) == doctest::Approx(base).epsilon(1e-13));
    }
}

TEST_CASE("digamma reference values within 1e-10 relative error") {
    // psi(1) = -gamma, psi(0.5) = -gamma - 2 log 2, psi(2) = 1 - gamma,
    // plus high-precision reference evaluations
    const double euler = 0.57721566490153286;
    CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-10));
    CHECK(digamma(2.0) == doctest::Approx(1.0 - euler).epsilon(1e-10));
    CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-10));
    CHECK(digamma(0.1) == doctest::Approx(-10.423754940411076).epsilon(1e-10));
    CHECK(digamma(7.3) == doctest::Approx(1.9178203356379861).epsilon(1e-10));
    CHECK(digamma(25.0) == doctest::Approx(3.198742512851974).epsilon(1e-10));
    CHECK_THROWS_AS(digamma(0.0), std::domain_error);
    CHECK_THROWS_AS(digamma(-1.5), std::domain_error);
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x") {
    std::mt19937_64 engine(11);
    std::uniform_real_distribution<double> unif(0.05, 40.0);
    for (int rep = 0; rep < 500; ++rep) {
        const double x = unif(engine);
        CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-10));
    }
}

TEST_CASE("truncated normal mean examples") {
    const double half_normal = std::sqrt(2.0 / M_PI);
    CHECK(truncated_normal_mean(0.0, TruncationSide::positive) ==
          doctest::Approx(half_normal).epsilon(1e-12));
    CHECK(truncated_normal_mean(0.0, TruncationSide::negative) ==
          doctest::Approx(-half_normal).epsilon(1e-12));

    // quadrature oracle for the positive-side truncated density at location 1.5
    const double loc = 1.5;
    auto numerator = [&](double z) { return z * oracles::std_normal_pdf(z - loc); };
    auto mass = [&](double z) { return oracles::std_normal_pdf(z - loc); };
    const double mean = oracles::integrate(numerator, 0.0, loc + 12.0, 1e-13) /
                        oracles::integrate(mass, 0.0, loc + 12.0, 1e-13);
    CHECK(truncated_normal_mean(loc, TruncationSide::positive) == doctest::Approx(mean).epsilon(1e-8));
}

TEST_CASE("truncated normal second moment against quadrature") {
    for (double loc : {-3.0, -0.7, 0.0, 0.9, 2.5}) {
        auto numerator = [&](double z) { return z * z * oracles::std_normal_pdf(z - loc); };
        auto mass = [&](double z) { return oracles::std_normal_pdf(z - loc); };
        const double hi = std::max(0.0, loc) + 12.0;
        const double second = oracles::integrate(numerator, 0.0, hi, 1e-13) /
                              oracles::integrate(mass, 0.0, hi, 1e-13);
        CHECK(truncated_normal_second_moment(loc, TruncationSide::positive) ==
              doctest::Approx(second).epsilon(1e-8));
    }
}

TEST_CASE("truncated normal mean stays on its side and is monotone") {
    // Beyond loc ~ 8 the Mills correction drops under one ulp of loc, so the
    // strict inequalities hold only up to double resolution.
    double previous = -std::numeric_limits<double>::infinity();
    for (double loc = -120.0; loc <= 120.0; loc += 0.25) {
        const double m = truncated_normal_mean(loc, TruncationSide::positive);
        CHECK(m > 0.0);
        if (loc <= 8.0) {
            CHECK(m > loc);
            CHECK(m > previous);
        } else {
            CHECK(m >= loc);
            CHECK(m >= previous);
        }
        previous = m;
        CHECK(truncated_normal_mean(loc, TruncationSide::negative) ==
              doctest::Approx(-truncated_normal_mean(-loc, TruncationSide::positive)));
    }
}

TEST_CASE("deep tail truncated mean uses the asymptotic branch smoothly") {
    // continuity across the switch at -35
    const double below = truncated_normal_mean(-35.0 - 1e-9, TruncationSide::positive);
    const double above = truncated_normal_mean(-35.0 + 1e-9, TruncationSide::positive);
    CHECK(below == doctest::Approx(above).epsilon(1e-9));
    // mean ~ 1/|loc| far out
    CHECK(truncated_normal_mean(-100.0, TruncationSide::positive) ==
          doctest::Approx(1.0 / 100.0).epsilon(1e-3));
}

TEST_CASE("normal cdf helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(log_normal_cdf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    // the erfc branch agrees with the tail expansion where both are accurate
    for (double x : {-30.0, -32.0, -34.0}) {
        const double ix2 = 1.0 / (x * x);
        const double series =
            1.0 + ix2 * (-1.0 + ix2 * (3.0 + ix2 * (-15.0 + ix2 * 105.0)));
        const double tail = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) - std::log(-x) +
                            std::log(series);
        CHECK(log_normal_cdf(x) == doctest::Approx(tail).epsilon(1e-12));
    }
    // hazard at -50 ~ 50 + 1/50
    CHECK(normal_hazard(-50.0) == doctest::Approx(50.0 + 1.0 / 50.0).epsilon(1e-4));
}
