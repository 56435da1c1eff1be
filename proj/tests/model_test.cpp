#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lcav/model.hpp"

using namespace lcav;

TEST_CASE("beta enum maps to its exponent and back")
{
    CHECK(beta_exponent(Beta::minus_half) == -0.5);
    CHECK(beta_exponent(Beta::zero) == 0.0);
    CHECK(beta_exponent(Beta::plus_half) == 0.5);

    CHECK(beta_from_value(-0.5) == Beta::minus_half);
    CHECK(beta_from_value(0.0) == Beta::zero);
    CHECK(beta_from_value(0.5) == Beta::plus_half);
    CHECK(!beta_from_value(0.3).has_value());
    CHECK(!beta_from_value(1.0).has_value());
}

TEST_CASE("coupling_f follows n^beta with the integer edge cases")
{
    for (int n = 0; n < 6; ++n)
        CHECK(coupling_f(n, Beta::zero) == 1.0);
    for (int n = 0; n < 6; ++n)
        CHECK(coupling_f(n, Beta::plus_half) == doctest::Approx(std::sqrt(double(n))).epsilon(1e-15));
    for (int n = 1; n < 6; ++n)
        CHECK(coupling_f(n, Beta::minus_half) ==
              doctest::Approx(1.0 / std::sqrt(double(n))).epsilon(1e-15));
    CHECK_THROWS_AS(coupling_f(0, Beta::minus_half), std::domain_error);
    CHECK_THROWS_AS(coupling_f(-1, Beta::zero), std::invalid_argument);
}

TEST_CASE("the minus-half coupling cancels the ladder factor exactly")
{
    // f(n) sqrt(n) = 1 for every n >= 1, the identity behind the exactly
    // periodic Rabi dynamics of that model.
    for (int n = 1; n < 50; ++n)
        CHECK(coupling_f(n, Beta::minus_half) * std::sqrt(double(n)) ==
              doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kerr and cross-kerr shifts")
{
    CHECK(kerr_shift(0, 0.7) == 0.0);
    CHECK(kerr_shift(1, 0.7) == 0.0);
    CHECK(kerr_shift(3, 0.5) == doctest::Approx(3.0));
    CHECK(kerr_shift(10, 0.25) == doctest::Approx(0.25 * 90.0));
    CHECK_THROWS_AS(kerr_shift(-2, 1.0), std::invalid_argument);

    CHECK(cross_kerr_shift(0, 5, 2.0) == 0.0);
    CHECK(cross_kerr_shift(3, 4, 0.5) == doctest::Approx(6.0));
    CHECK(cross_kerr_shift(4, 3, 0.5) == cross_kerr_shift(3, 4, 0.5));
    CHECK_THROWS_AS(cross_kerr_shift(1, -1, 1.0), std::invalid_argument);
}

TEST_CASE("interaction_diagonal assembles detunings and Kerr shifts per level")
{
    ModelParams p;
    p.delta_L = 0.4;
    p.delta_R = 0.9;
    p.chi_L = 0.3;
    p.chi_R = 0.2;
    p.chi_C = 0.6;

    const int m = 4, n = 3;
    const double shared = 0.3 * 4 * 3 + 0.2 * 3 * 2 + 0.6 * 4 * 3;
    CHECK(interaction_diagonal(p, {1, m, n}) == doctest::Approx(shared - 0.4).epsilon(1e-15));
    CHECK(interaction_diagonal(p, {2, m, n}) == doctest::Approx(shared).epsilon(1e-15));
    CHECK(interaction_diagonal(p, {3, m, n}) == doctest::Approx(shared - 0.9).epsilon(1e-15));
    CHECK_THROWS_AS(interaction_diagonal(p, {4, 0, 0}), std::invalid_argument);

    // Vacuum label carries only the detuning of its level.
    CHECK(interaction_diagonal(p, {2, 0, 0}) == 0.0);
    CHECK(interaction_diagonal(p, {1, 0, 0}) == doctest::Approx(-0.4));
}

TEST_CASE("validate accepts physical parameters and hands back a token")
{
    ModelParams p;
    p.delta_L = -2.0; // detunings may take either sign
    p.chi_C = 1.0;
    p.omega_rabi = c64(3.0, -4.0);
    const ValidatedModel m = validate(p);
    CHECK(m->chi_C == 1.0);
    CHECK(m.params().omega_rabi == c64(3.0, -4.0));
}

TEST_CASE("validate rejects unphysical parameters")
{
    const auto expect_reject = [](auto&& mutate) {
        ModelParams p;
        mutate(p);
        CHECK_THROWS_AS(validate(p), std::invalid_argument);
    };
    expect_reject([](ModelParams& p) { p.lambda_L = 0.0; });
    expect_reject([](ModelParams& p) { p.lambda_R = -1.0; });
    expect_reject([](ModelParams& p) { p.chi_L = -0.1; });
    expect_reject([](ModelParams& p) { p.chi_C = -1e-30; });
    expect_reject([](ModelParams& p) { p.delta_R = std::nan(""); });
    expect_reject([](ModelParams& p) { p.omega_rabi = c64(1.0, std::numeric_limits<double>::infinity()); });
}

TEST_CASE("validate checks absolute frequencies against the level ordering")
{
    ModelParams p;
    p.absolute_freqs = AbsoluteFreqs{100.0, 80.0, 150.0};
    CHECK_NOTHROW(validate(p));

    p.absolute_freqs = AbsoluteFreqs{-5.0, 80.0, 150.0};
    CHECK_THROWS_AS(validate(p), std::invalid_argument);

    // A detuning so negative it pushes a lower level above the upper one.
    p.absolute_freqs = AbsoluteFreqs{100.0, 80.0, 150.0};
    p.delta_L = -100.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.delta_L = -99.0;
    CHECK_NOTHROW(validate(p));
}
