#include "doctest.h"

#include <stdexcept>

#include "tietime/polynomial.hpp"
#include "tietime/process.hpp"
#include "tietime/verify.hpp"

using namespace tietime;

namespace {

StatePolynomial var(int vars, int slot) { return StatePolynomial::variable(vars, slot); }

}  // namespace

TEST_CASE("drift of the pair product is -1/m") {
    SUBCASE("three teams, arbitrary states") {
        const auto AB = var(2, 0) * var(2, 1);
        for (const std::vector<std::int64_t> s : {std::vector<std::int64_t>{1, 1},
                                                  {2, 3}, {7, 5}, {40, 11}}) {
            CHECK(drift_at(AB, 3, s) == Rational(-1, 3));
        }
    }
    SUBCASE("five teams, third pair") {
        const auto h = pair_product(5, 3);
        const std::vector<std::int64_t> s{7, 7, 2, 9};
        CHECK(drift_at(h, 5, s) == Rational(-1, 5));
    }
    SUBCASE("as a polynomial identity") {
        for (int m = 3; m <= 6; ++m) {
            for (int i = 1; i <= m - 2; ++i) {
                const auto d = drift_polynomial(pair_product(m, i), m);
                CHECK(d == StatePolynomial::constant(m - 1, Rational(-1, m)));
            }
        }
    }
}

TEST_CASE("the cubic combination A^2B + AB^2 is drift-free for three teams") {
    const auto A = var(2, 0), B = var(2, 1);
    const auto h = A * A * B + A * B * B;
    CHECK(drift_polynomial(h, 3).is_zero());
    const std::vector<std::int64_t> s{4, 9};
    CHECK(drift_at(h, 3, s) == 0);
}

TEST_CASE("drift is linear") {
    const auto A = var(3, 0), B = var(3, 1), C = var(3, 2);
    const auto h1 = A * B * B + C;
    const auto h2 = A * A * C - B.scaled(Rational(2, 7));
    const std::vector<std::int64_t> s{3, 2, 8};
    CHECK(drift_at(h1 + h2, 4, s) == drift_at(h1, 4, s) + drift_at(h2, 4, s));
    CHECK((drift_polynomial(h1 + h2, 4) - drift_polynomial(h1, 4) - drift_polynomial(h2, 4))
              .is_zero());
}

TEST_CASE("pairwise drifts depend only on the pair coordinates") {
    const auto h = pair_product(5, 2);
    const std::vector<std::int64_t> s1{1, 4, 6, 2}, s2{9, 4, 6, 30};
    CHECK(drift_at(h, 5, s1) == drift_at(h, 5, s2));
    const auto q = pair_quartic(5, 2);
    CHECK(drift_at(q, 5, s1) == drift_at(q, 5, s2));
}

TEST_CASE("pair martingale sweep is clean") {
    for (int m : {3, 4, 5}) {
        const auto rep = verify_pair_martingales(m, 12);
        CHECK(rep.ok());
        CHECK(rep.states_checked > 0);
    }
}

TEST_CASE("minimum of the compensated pair products is a supermartingale") {
    const auto rep4 = verify_min_supermartingale(4, 14);
    CHECK(rep4.ok());
    CHECK(rep4.states_checked == 14ull * 14 * 14);
    const auto rep5 = verify_min_supermartingale(5, 7);
    CHECK(rep5.ok());
    const auto rep3 = verify_min_supermartingale(3, 20);
    CHECK(rep3.ok());
}

TEST_CASE("min one-step expectation is an equality when one pair stays strictly minimal") {
    // at (2,2,9) the first pair product stays the argmin under every winner
    const GapState s{4, {2, 2, 9}};
    std::int64_t sum = 1;
    for (const auto& d : step_distribution(4)) {
        const std::int64_t g0 = s.gaps[0] + d.delta[0], g1 = s.gaps[1] + d.delta[1],
                           g2 = s.gaps[2] + d.delta[2];
        sum += std::min(g0 * g1, g1 * g2);
    }
    CHECK(sum == 4 * std::min(s.gaps[0] * s.gaps[1], s.gaps[1] * s.gaps[2]));
}

TEST_CASE("weight function values") {
    CHECK(phi_weight(3, 5) == Rational(5));
    CHECK(phi_weight(2, 2) == Rational(8, 3));
    CHECK(phi_weight(1, 1) == Rational(2));
    CHECK(phi_weight(7, 2) == Rational(7));
    CHECK_THROWS_AS(phi_weight(0, 3), std::invalid_argument);
}

TEST_CASE("weighted product inequality: anchors and exhaustive casework") {
    const auto rep = verify_phi_supermartingale(12);
    CHECK(rep.ok());
    CHECK(rep.states_checked == 12ull * 12 * 12);
    // all five cases show up and partition the grid
    CHECK(rep.case_counts.size() == 5);
    std::uint64_t total = 0;
    for (const auto& [name, count] : rep.case_counts) total += count;
    CHECK(total == rep.states_checked);

    // spot values: slack is y exactly off the near-diagonal, zero elsewhere
    auto slack_at = [](std::int64_t x, std::int64_t y, std::int64_t z) -> Rational {
        Rational lhs = Rational(4 * x * y * z) / phi_weight(x, z) - 1;
        Rational rhs = 0;
        if (x > 1) rhs += Rational((x - 1) * y * z) / phi_weight(x - 1, z);
        rhs += Rational((x + 1) * (y - 1) * z) / phi_weight(x + 1, z);
        if (z > 1) rhs += Rational(x * (y + 1) * (z - 1)) / phi_weight(x, z - 1);
        rhs += Rational(x * y * (z + 1)) / phi_weight(x, z + 1);
        return lhs - rhs;
    };
    CHECK(slack_at(3, 5, 3) == 0);
    CHECK(slack_at(3, 5, 2) == Rational(5));
    CHECK(slack_at(7, 4, 2) == 0);
    CHECK(slack_at(2, 9, 3) == Rational(9));
    CHECK(slack_at(1, 1, 1) == 0);
}

TEST_CASE("the casework inequality matches the conditional-expectation form") {
    // E[product/weight at the next state] + 1/4 <= current product/weight,
    // checked directly at a batch of states
    const std::vector<std::vector<std::int64_t>> states{
        {1, 1, 1}, {2, 1, 3}, {3, 5, 3}, {3, 5, 2}, {7, 4, 2}, {10, 2, 10},
        {4, 4, 5}, {5, 9, 1}, {1, 7, 6}, {2, 2, 2}, {8, 3, 8}, {6, 1, 4},
        {9, 9, 9}, {2, 8, 1}, {1, 3, 2}, {5, 5, 6}, {12, 2, 3}, {3, 1, 12},
        {4, 10, 4}, {11, 6, 10}};
    for (const auto& s : states) {
        const std::int64_t x = s[0], y = s[1], z = s[2];
        Rational expect = 0;
        for (const auto& d : step_distribution(4)) {
            const std::int64_t a = x + d.delta[0], b = y + d.delta[1], c = z + d.delta[2];
            if (a == 0 || b == 0 || c == 0) continue;  // zero numerator: term drops
            expect += Rational(a) * Rational(b) * Rational(c) / phi_weight(a, c);
        }
        expect /= 4;
        const Rational current = Rational(x) * Rational(y) * Rational(z) / phi_weight(x, z);
        CHECK(expect + Rational(1, 4) <= current);
    }
}

TEST_CASE("one-step moment identities") {
    SUBCASE("anchor value by brute enumeration: E[A^2 B^2] from (2,3,5), m=4") {
        Rational acc = 0;
        for (const auto& d : step_distribution(4)) {
            const std::int64_t a = 2 + d.delta[0], b = 3 + d.delta[1];
            acc += Rational(a * a * b * b);
        }
        acc /= 4;
        CHECK(acc == Rational(145, 4));

        const auto h = pair_product(4, 1) * pair_product(4, 1);
        const std::vector<std::int64_t> s{2, 3, 5};
        CHECK(one_step_expectation(h, 4).eval(s) == Rational(145, 4));
    }
    SUBCASE("exhaustive sweeps, including the boundary pair") {
        CHECK(verify_moment_identities(3, 25).ok());
        CHECK(verify_moment_identities(4, 10).ok());
        CHECK(verify_moment_identities(5, 6).ok());
    }
}

TEST_CASE("quartic drift identity") {
    SUBCASE("anchor: three teams at (1,1)") {
        const std::vector<std::int64_t> s{1, 1};
        CHECK(drift_at(pair_quartic(3, 1), 3, s) == Rational(11, 9));
    }
    SUBCASE("sweeps") {
        CHECK(verify_quartic_drift(3, 20).ok());
        CHECK(verify_quartic_drift(4, 12).ok());
        CHECK(verify_quartic_drift(6, 5).ok());
    }
    SUBCASE("random states for six teams") {
        const auto expected = pair_product(6, 2).scaled(make_rational(4, 6)) -
                              StatePolynomial::constant(5, Rational(1, 18));
        for (const std::vector<std::int64_t> s : {std::vector<std::int64_t>{3, 1, 4, 1, 5},
                                                  {2, 7, 1, 8, 2}, {9, 9, 9, 9, 9}}) {
            CHECK(drift_at(pair_quartic(6, 2), 6, s) == expected.eval(s));
        }
    }
}

TEST_CASE("time-compensated quartic is a martingale for every n") {
    CHECK(verify_time_squared_martingale(3, 20, 10).ok());
    CHECK(verify_time_squared_martingale(4, 8, 6).ok());
    CHECK(verify_time_squared_martingale(5, 5, 5).ok());
}

TEST_CASE("grid bounds are validated") {
    CHECK_THROWS_AS(verify_pair_martingales(2, 10), std::invalid_argument);
    CHECK_THROWS_AS(verify_pair_martingales(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(verify_time_squared_martingale(4, 5, -1), std::invalid_argument);
}
